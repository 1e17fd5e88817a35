#include "tpde/compress.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tpde/errors.hpp"

namespace tpde {

BrickWallCircuit init_brickwall(Index width, Index depth, double eps, std::uint64_t seed,
                                Index first_offset) {
  if (eps < 0.0) throw ValidationError("initial perturbation must be non-negative");
  BrickWallCircuit c = identity_circuit(width, depth, first_offset);
  if (eps == 0.0) return c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (auto& layer : c.layers) {
    for (auto& g : layer.gates) {
      Gate r;
      for (int i = 0; i < 16; ++i) r.data()[i] = cplx(normal(rng), normal(rng));
      g = linalg::polar(CMatrix(Gate::Identity() + eps * r), false);
    }
  }
  return c;
}

std::vector<std::pair<Index, Index>> zigzag_order(const BrickWallCircuit& c) {
  std::vector<std::pair<Index, Index>> order;
  for (Index col = 0; col + 1 < c.width; ++col) {
    std::vector<std::pair<Index, Index>> column;
    for (Index l = 0; l < c.depth(); ++l) {
      const Index off = c.layers[l].offset;
      if (col < off || (col - off) % 2 != 0) continue;
      const Index j = (col - off) / 2;
      if (j < c.layers[l].gates.size()) column.emplace_back(l, j);
    }
    if (col % 2 == 1) std::reverse(column.begin(), column.end());
    order.insert(order.end(), column.begin(), column.end());
  }
  return order;
}

namespace {

// Gates of one layer that share no qubit with gate j, plus idle qubits, as
// (first qubit, qubit count, matrix) groups.
struct Group {
  Index first;
  Index count;
  CMatrix m;
};

std::vector<Group> other_groups(const BrickWallCircuit& c, Index layer, Index j) {
  std::vector<Group> groups;
  std::vector<bool> covered(c.width, false);
  const auto& gates = c.layers[layer].gates;
  for (Index k = 0; k < gates.size(); ++k) {
    const Index p = c.pair_start(layer, k);
    covered[p] = covered[p + 1] = true;
    if (k != j) groups.push_back({p, 2, gates[k]});
  }
  for (Index q = 0; q < c.width; ++q) {
    if (!covered[q]) groups.push_back({q, 1, CMatrix::Identity(2, 2)});
  }
  return groups;
}

// Environments for the evolution objective f = Re Tr[D L_{d-1} ... L_0].
// With the cursor on layer l, E = L_{l-1} ... L_0 D L_{d-1} ... L_{l+1} and
// f = Re Tr[L_l E].
class EvolutionEnv {
 public:
  EvolutionEnv(const CMatrix& d, const BrickWallCircuit& c) : d_(d), c_(c) { reset(); }

  void reset() {
    e_ = d_;
    for (Index l = c_.depth(); l-- > 1;) multiply_right(l, false);
    cur_ = 0;
  }

  void move_to(Index l) {
    while (cur_ < l) {
      multiply_left(cur_, false);
      multiply_right(cur_ + 1, true);
      ++cur_;
    }
    while (cur_ > l) {
      multiply_left(cur_ - 1, true);
      multiply_right(cur_, false);
      --cur_;
    }
  }

  /// F with Re Tr[G F] the objective as a function of gate j of the current layer.
  Gate reduced(Index j) const {
    const Index n = c_.width;
    // Column-major E(y, x) read as a row-major tensor T[x bits, y bits].
    Tensor t(Shape(2 * n, 2), std::vector<cplx>(e_.data(), e_.data() + e_.size()));
    std::vector<Index> labels(2 * n);
    for (Index k = 0; k < 2 * n; ++k) labels[k] = k;
    auto position = [&](Index label) {
      return static_cast<Index>(std::find(labels.begin(), labels.end(), label) - labels.begin());
    };
    for (const auto& g : other_groups(c_, cur_, j)) {
      const Tensor m = Tensor::from_matrix(RowMatrix(g.m)).reshaped(Shape(2 * g.count, 2));
      std::vector<std::pair<Index, Index>> pairs;
      for (Index i = 0; i < g.count; ++i) {
        pairs.emplace_back(position(g.first + i), i);
        pairs.emplace_back(position(n + g.first + i), g.count + i);
      }
      t = contract(t, m, pairs);
      for (Index i = 0; i < g.count; ++i) {
        labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(position(g.first + i)));
        labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(position(n + g.first + i)));
      }
    }
    // Remaining legs (x_p, x_p+1, y_p, y_p+1): T[a, b] = F[b, a].
    return Gate(ConstRowMap(t.raw(), 4, 4).transpose());
  }

 private:
  void multiply_left(Index l, bool dagger) {
    const auto& gates = c_.layers[l].gates;
    for (Index k = 0; k < gates.size(); ++k) {
      dense::apply_gate_left(e_, dagger ? Gate(gates[k].adjoint()) : gates[k], c_.pair_start(l, k));
    }
  }
  void multiply_right(Index l, bool dagger) {
    const auto& gates = c_.layers[l].gates;
    for (Index k = 0; k < gates.size(); ++k) {
      dense::apply_gate_right(e_, dagger ? Gate(gates[k].adjoint()) : gates[k], c_.pair_start(l, k));
    }
  }

  const CMatrix& d_;
  const BrickWallCircuit& c_;
  CMatrix e_;
  Index cur_ = 0;
};

// Vectors for f = Re <t| L_{d-1} ... L_0 |0>: with the cursor on layer l,
// bot = L_{l-1} ... L_0 |0> and top = L_{l+1}^dag ... L_{d-1}^dag |t>.
class PrepEnv {
 public:
  PrepEnv(const CVector& target, const BrickWallCircuit& c) : t_(target), c_(c) { reset(); }

  void reset() {
    bot_ = CVector::Zero(t_.size());
    bot_(0) = 1.0;
    top_ = t_;
    for (Index l = c_.depth(); l-- > 1;) apply(top_, l, true);
    cur_ = 0;
  }

  void move_to(Index l) {
    while (cur_ < l) {
      apply(bot_, cur_, false);
      apply(top_, cur_ + 1, false);
      ++cur_;
    }
    while (cur_ > l) {
      apply(bot_, cur_ - 1, true);
      apply(top_, cur_, true);
      --cur_;
    }
  }

  Gate reduced(Index j) const {
    CVector b = bot_;
    for (const auto& g : other_groups(c_, cur_, j)) {
      if (g.count == 2) dense::apply_gate(b, g.m, g.first);
    }
    const Index n = c_.width;
    const Index p = c_.pair_start(cur_, j);
    const Index outer = Index{1} << p;
    const Index inner = Index{1} << (n - 2 - p);
    Gate f = Gate::Zero();
    for (Index o = 0; o < outer; ++o) {
      for (Index bi = 0; bi < 4; ++bi) {
        const cplx* bp = b.data() + (o * 4 + bi) * inner;
        for (Index ai = 0; ai < 4; ++ai) {
          const cplx* tp = top_.data() + (o * 4 + ai) * inner;
          cplx s = 0.0;
          for (Index i = 0; i < inner; ++i) s += bp[i] * std::conj(tp[i]);
          f(static_cast<Eigen::Index>(bi), static_cast<Eigen::Index>(ai)) += s;
        }
      }
    }
    return f;
  }

 private:
  void apply(CVector& v, Index l, bool dagger) const {
    const auto& gates = c_.layers[l].gates;
    if (!dagger) {
      for (Index k = 0; k < gates.size(); ++k) dense::apply_gate(v, gates[k], c_.pair_start(l, k));
    } else {
      for (Index k = 0; k < gates.size(); ++k) {
        dense::apply_gate(v, Gate(gates[k].adjoint()), c_.pair_start(l, k));
      }
    }
  }

  const CVector& t_;
  const BrickWallCircuit& c_;
  CVector bot_, top_;
  Index cur_ = 0;
};

// Shared sweep driver. `scale` is 2^N for the evolution objective and 1 for
// state preparation; `value` is the initial trace or overlap.
template <class Env>
void run_sweeps(Env& env, BrickWallCircuit& c, const CompressOptions& opt, bool prep, double scale,
                cplx value, CompressResult& out) {
  auto objective = [&](double f) { return prep ? 1.0 - f : 2.0 * (scale - f); };
  auto keep_checkpoint = [&](Index sweep) {
    if (std::find(opt.checkpoints.begin(), opt.checkpoints.end(), sweep) != opt.checkpoints.end()) {
      out.checkpoints.emplace_back(sweep, c);
    }
  };
  double f = value.real();
  out.reports.push_back({0, objective(f), std::abs(value) / scale});
  keep_checkpoint(0);
  const auto order = zigzag_order(c);
  for (Index sweep = 1; sweep <= opt.sweeps; ++sweep) {
    env.reset();
    for (const auto& [l, j] : order) {
      env.move_to(l);
      const Gate fr = env.reduced(j);
      if (fr.norm() > 0.0) {
        c.layers[l].gates[j] = linalg::polar(CMatrix(fr.adjoint()), true);
        f = Eigen::JacobiSVD<Gate>(fr).singularValues().sum();
      }
      if (opt.record_updates) out.update_objectives.push_back(objective(f));
    }
    out.reports.push_back({sweep, objective(f), std::abs(f) / scale});
    keep_checkpoint(sweep);
  }
}

CMatrix dense_reference(const Mpo& reference_adjoint) {
  if (reference_adjoint.length() > kMaxDenseEvolutionQubits) {
    throw ResourceError("dense evolution compression is limited to " + std::to_string(kMaxDenseEvolutionQubits) +
                        " qubits");
  }
  return to_dense(reference_adjoint);
}

cplx dense_trace(const CMatrix& d, const BrickWallCircuit& c) {
  return (d.transpose().cwiseProduct(to_dense(c))).sum();
}

cplx dense_overlap(const CVector& t, const BrickWallCircuit& c) {
  CVector v = CVector::Zero(t.size());
  v(0) = 1.0;
  apply_circuit(c, v);
  return t.dot(v);
}

}  // namespace

Tensor environment_gate(const Mpo& reference_adjoint, const BrickWallCircuit& c, Index layer,
                        Index j) {
  const CMatrix d = dense_reference(reference_adjoint);
  if (d.rows() != (Eigen::Index{1} << c.width)) throw ShapeError("reference width mismatch");
  EvolutionEnv env(d, c);
  env.move_to(layer);
  return Tensor::from_matrix(RowMatrix(env.reduced(j).adjoint()));
}

Tensor environment_gate(const Mps& target, const BrickWallCircuit& c, Index layer, Index j) {
  const CVector t = to_statevector(target);
  if (t.size() != (Eigen::Index{1} << c.width)) throw ShapeError("target width mismatch");
  PrepEnv env(t, c);
  env.move_to(layer);
  return Tensor::from_matrix(RowMatrix(env.reduced(j).adjoint()));
}

cplx evolution_trace(const Mpo& reference_adjoint, const BrickWallCircuit& c) {
  return dense_trace(dense_reference(reference_adjoint), c);
}

cplx prep_overlap(const Mps& target, const BrickWallCircuit& c) {
  const Mps out = circuit_to_mps(c, zero_state(c.width), kUnboundedBond, 0.0);
  return inner(target, out);
}

CompressResult optimize_evolution(const CMatrix& reference_adjoint, Index depth,
                                  const CompressOptions& opt) {
  const Index n = dense::qubit_count(static_cast<Index>(reference_adjoint.rows()));
  if (depth < 1) throw ValidationError("circuit depth must be >= 1");
  CompressResult out;
  out.circuit = init_brickwall(n, depth, opt.perturbation, opt.seed, opt.first_offset);
  EvolutionEnv env(reference_adjoint, out.circuit);
  const double scale = static_cast<double>(Index{1} << n);
  run_sweeps(env, out.circuit, opt, false, scale, dense_trace(reference_adjoint, out.circuit), out);
  return out;
}

CompressResult optimize_evolution(const Mpo& reference_adjoint, Index depth,
                                  const CompressOptions& opt) {
  return optimize_evolution(dense_reference(reference_adjoint), depth, opt);
}

CompressResult optimize_prep(const CVector& target, Index depth, const CompressOptions& opt) {
  const Index n = dense::qubit_count(static_cast<Index>(target.size()));
  if (depth < 1) throw ValidationError("circuit depth must be >= 1");
  CompressResult out;
  out.circuit = init_brickwall(n, depth, opt.perturbation, opt.seed, opt.first_offset);
  PrepEnv env(target, out.circuit);
  run_sweeps(env, out.circuit, opt, true, 1.0, dense_overlap(target, out.circuit), out);
  return out;
}

CompressResult optimize_prep(const Mps& target, Index depth, const CompressOptions& opt) {
  if (target.length() > 20) throw ResourceError("dense preparation target is limited to 20 qubits");
  return optimize_prep(to_statevector(target), depth, opt);
}

EnhanceResult enhance_overlap(const Mps& target, Index depth_per_iter, const CompressOptions& opt,
                              Index max_iters, double cutoff, Index max_bond, double gain_tol) {
  if (depth_per_iter < 1) throw ValidationError("depth per iteration must be >= 1");
  EnhanceResult out;
  out.circuit.width = target.length();
  out.residual = target;
  out.stop_reason = "max_iters";
  double best = std::abs(inner(target, zero_state(target.length())));
  for (Index k = 0; k < max_iters; ++k) {
    CompressOptions o = opt;
    o.seed = opt.seed + k;
    // The new block acts before the existing ones, so its last layer must
    // alternate with the current first layer.
    o.first_offset = out.circuit.depth() == 0
                         ? opt.first_offset
                         : (out.circuit.layers.front().offset + depth_per_iter) % 2;
    CompressResult it = optimize_prep(out.residual, depth_per_iter, o);
    Mps next = circuit_to_mps(adjoint(it.circuit), out.residual, kUnboundedBond, cutoff);
    double overlap = std::abs(inner(next, zero_state(target.length())));
    if (overlap < best) {
      // Never worse than leaving the residual untouched.
      it.circuit = identity_circuit(target.length(), depth_per_iter, o.first_offset);
      next = out.residual;
      overlap = best;
    }
    if (next.max_bond() > max_bond) {
      out.stop_reason = "bond_budget";
      break;
    }
    out.circuit = concatenate(it.circuit, out.circuit);
    out.iterations.push_back(std::move(it));
    out.residual = std::move(next);
    const double gain = overlap - best;
    out.overlaps.push_back(overlap);
    best = overlap;
    if (k > 0 && gain < gain_tol) {
      out.stop_reason = "converged";
      break;
    }
  }
  return out;
}

}  // namespace tpde
