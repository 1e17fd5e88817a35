#include "tpde/aem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tpde/errors.hpp"

namespace tpde {

void VariantSet::validate() const {
  if (variants.size() < 2) throw ValidationError("error mitigation needs at least two variants");
  for (const auto& v : variants) {
    if (v.evol.width != variants.front().evol.width) {
      throw ValidationError("variant circuits differ in width");
    }
  }
}

VariantSet sweep_variants(const CompressResult& run, const std::vector<Index>& sweeps) {
  VariantSet set;
  set.kind = VariantKind::sweeps;
  for (Index s : sweeps) {
    const auto it = std::find_if(run.checkpoints.begin(), run.checkpoints.end(),
                                 [&](const auto& cp) { return cp.first == s; });
    if (it == run.checkpoints.end()) {
      throw ValidationError("no checkpoint kept after " + std::to_string(s) + " sweeps");
    }
    set.variants.push_back({"sweeps=" + std::to_string(s), it->second, static_cast<double>(s)});
  }
  return set;
}

namespace {

// Left operand in either representation.
struct Left {
  const Mpo* mpo = nullptr;
  const BrickWallCircuit* circuit = nullptr;
  Index width() const { return mpo ? mpo->length() : circuit->width; }
};

SandwichResult dense_chain(const Mps& prep, const Left& left, const BrickWallCircuit& right,
                           Index steps, const SandwichOptions& opt) {
  const Index n = right.width;
  const Index idle = prep.length() - n;
  const CVector psi = to_statevector(prep);
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::Map<const CMatrix> wave(psi.data(), dim, Eigen::Index{1} << idle);
  const CMatrix l = left.mpo ? to_dense(*left.mpo) : to_dense(*left.circuit);
  const CMatrix r = to_dense(right);
  CMatrix c = CMatrix::Identity(dim, dim);
  SandwichResult out;
  for (Index step = 1; step <= steps; ++step) {
    c = (l * c * r).eval();
    const Mpo compressed = mpo_from_dense(c, kUnboundedBond, opt.cutoff);
    const Index bond = compressed.max_bond();
    if (bond > opt.max_bond) {
      out.budget_exceeded = true;
      out.stop_step = step;
      break;
    }
    if (opt.cutoff > 0.0) c = to_dense(compressed);
    out.bonds.push_back(bond);
    out.values.push_back((wave.adjoint() * c * wave).trace());
  }
  return out;
}

SandwichResult mpo_chain(const Mps& prep, const Left& left, const BrickWallCircuit& right,
                         Index steps, const SandwichOptions& opt) {
  const Index n = right.width;
  const Index idle = prep.length() - n;
  Mpo c = identity_mpo(n);
  SandwichResult out;
  for (Index step = 1; step <= steps; ++step) {
    if (left.mpo) {
      c = mpo_product(*left.mpo, c, kUnboundedBond, opt.cutoff);
    } else {
      const BrickWallCircuit& lc = *left.circuit;
      for (Index ly = 0; ly < lc.depth(); ++ly)
        for (Index j = 0; j < lc.layers[ly].gates.size(); ++j)
          apply_gate_left(c, lc.layers[ly].gates[j], lc.pair_start(ly, j), kUnboundedBond, opt.cutoff);
    }
    for (Index ly = right.depth(); ly-- > 0;)
      for (Index j = 0; j < right.layers[ly].gates.size(); ++j)
        apply_gate_right(c, right.layers[ly].gates[j], right.pair_start(ly, j), kUnboundedBond,
                         opt.cutoff);
    compress(c, kUnboundedBond, opt.cutoff);
    if (c.max_bond() > opt.max_bond) {
      out.budget_exceeded = true;
      out.stop_step = step;
      break;
    }
    Mpo full = c;
    for (Index k = 0; k < idle; ++k) full = prepend_identity(full);
    out.bonds.push_back(c.max_bond());
    out.values.push_back(inner(prep, apply_mpo(full, prep, kUnboundedBond, 0.0)));
  }
  return out;
}

SandwichResult run_chain(const Mps& prep, const Left& left, const BrickWallCircuit& right,
                         Index steps, const SandwichOptions& opt) {
  if (left.width() != right.width) throw ShapeError("sandwich operands differ in width");
  if (prep.length() < right.width) throw ShapeError("state is narrower than the sandwich operands");
  const bool dense = opt.route == SandwichRoute::dense ||
                     (opt.route == SandwichRoute::automatic && right.width <= 10);
  return dense ? dense_chain(prep, left, right, steps, opt) : mpo_chain(prep, left, right, steps, opt);
}

}  // namespace

SandwichResult sandwich_overlaps(const Mps& prep, const Mpo& left, const BrickWallCircuit& right,
                                 Index steps, const SandwichOptions& opt) {
  Left l;
  l.mpo = &left;
  return run_chain(prep, l, right, steps, opt);
}

SandwichResult sandwich_overlaps(const Mps& prep, const BrickWallCircuit& left,
                                 const BrickWallCircuit& right, Index steps,
                                 const SandwichOptions& opt) {
  Left l;
  l.circuit = &left;
  return run_chain(prep, l, right, steps, opt);
}

MLTables compute_M_L(const Mps& prep, const VariantSet& variants, const Mpo& exact_forward,
                     Index steps, const SandwichOptions& opt) {
  variants.validate();
  const Index k = variants.variants.size();
  std::vector<SandwichResult> pairs, singles;
  std::vector<std::pair<Index, Index>> index;
  for (Index i = 0; i < k; ++i) {
    const BrickWallCircuit left = adjoint(variants.variants[i].evol);
    for (Index j = i; j < k; ++j) {
      pairs.push_back(sandwich_overlaps(prep, left, variants.variants[j].evol, steps, opt));
      index.emplace_back(i, j);
    }
  }
  for (Index i = 0; i < k; ++i) {
    singles.push_back(sandwich_overlaps(prep, exact_forward, variants.variants[i].evol, steps, opt));
  }
  MLTables t;
  t.completed_steps = steps;
  for (const auto& r : pairs) t.completed_steps = std::min(t.completed_steps, r.values.size());
  for (const auto& r : singles) t.completed_steps = std::min(t.completed_steps, r.values.size());
  for (Index n = 0; n < t.completed_steps; ++n) {
    Eigen::MatrixXd m(k, k);
    for (Index p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = index[p];
      m(i, j) = m(j, i) = std::norm(pairs[p].values[n]);
    }
    Eigen::VectorXd l(k);
    for (Index i = 0; i < k; ++i) l(i) = std::norm(singles[i].values[n]);
    t.m.push_back(m);
    t.l.push_back(l);
  }
  for (const auto& r : pairs) t.bonds.push_back(r.bonds);
  for (const auto& r : singles) t.bonds.push_back(r.bonds);
  return t;
}

double aem_objective(const Eigen::MatrixXd& m, const Eigen::VectorXd& l, const Eigen::VectorXd& c) {
  return 1.0 + c.dot(m * c) - 2.0 * l.dot(c);
}

AemWeights solve_weights(const Eigen::MatrixXd& m, const Eigen::VectorXd& l) {
  const Index k = static_cast<Index>(m.rows());
  if (k == 0 || m.cols() != m.rows() || l.size() != m.rows()) {
    throw ShapeError("M must be square and match L");
  }
  if ((m - m.transpose()).norm() > 1e-10 * std::max(1.0, m.norm())) {
    throw ValidationError("M must be symmetric");
  }
  constexpr double kL1 = 3.0, kTol = 1e-12;
  AemWeights out;
  Eigen::MatrixXd q = m;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  if (ev.minCoeff() < 1e-10 * std::max(1.0, ev.maxCoeff())) {
    q += 1e-10 * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    out.ridge = true;
  }

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& c) {
    if (std::abs(c.sum() - 1.0) > 1e-9 || c.lpNorm<1>() > kL1 + 1e-9) return;
    const double f = aem_objective(q, l, c);
    if (f < best) {
      best = f;
      out.c = c;
    }
  };
  for (Index i = 0; i < k; ++i) consider(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(k), i));

  // Each pattern fixes c_i = 0 or a sign for c_i; both with and without the
  // L1 bound active.
  Index patterns = 1;
  for (Index i = 0; i < k; ++i) patterns *= 3;
  for (Index code = 0; code < patterns; ++code) {
    std::vector<Index> free;
    std::vector<double> sign;
    Index rest = code;
    for (Index i = 0; i < k; ++i, rest /= 3) {
      if (rest % 3 == 0) continue;
      free.push_back(i);
      sign.push_back(rest % 3 == 1 ? 1.0 : -1.0);
    }
    const auto f = static_cast<Eigen::Index>(free.size());
    if (f == 0) continue;
    for (int active = 0; active < 2; ++active) {
      const Eigen::Index dim = f + 1 + active;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
      for (Eigen::Index x = 0; x < f; ++x) {
        for (Eigen::Index y = 0; y < f; ++y) a(x, y) = 2.0 * q(free[x], free[y]);
        a(x, f) = a(f, x) = 1.0;
        b(x) = 2.0 * l(free[x]);
        if (active) a(x, f + 1) = a(f + 1, x) = sign[x];
      }
      b(f) = 1.0;
      if (active) b(f + 1) = kL1;
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd sol = lu.solve(b);
      Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      bool consistent = true;
      for (Eigen::Index x = 0; x < f; ++x) {
        c(free[x]) = sol(x);
        consistent = consistent && sign[x] * sol(x) >= -kTol;
      }
      if (consistent) consider(c);
    }
  }
  out.objective = aem_objective(m, l, out.c);
  return out;
}

TimeSeries mitigated_series(const std::vector<AemWeights>& weights,
                            const std::vector<std::vector<std::array<double, 4>>>& measurements,
                            double a0sq, double dt) {
  const Index steps = weights.size();
  for (const auto& w : weights) {
    if (static_cast<Index>(w.c.size()) != measurements.size()) {
      throw ShapeError("weight count does not match the variant count");
    }
  }
  for (const auto& series : measurements) {
    if (series.size() < steps) throw ShapeError("variant measurements do not cover every step");
  }
  TimeSeries ts;
  ts.dt = dt;
  ts.a0sq = a0sq;
  for (Index n = 0; n < steps; ++n) {
    std::array<double, 4> mix{};
    for (Index i = 0; i < measurements.size(); ++i)
      for (Index th = 0; th < 4; ++th) mix[th] += weights[n].c(static_cast<Eigen::Index>(i)) * measurements[i][n][th];
    ts.samples.push_back({n + 1, combine_signal(mix[0], mix[1], mix[2], mix[3], a0sq)});
  }
  return ts;
}

}  // namespace tpde
