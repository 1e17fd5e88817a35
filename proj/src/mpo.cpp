#include "tpde/mpo.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"
#include "tpde/dense.hpp"
#include "tpde/errors.hpp"

namespace tpde {

std::vector<Index> Mpo::bonds() const { return chain::bonds(sites); }

Index Mpo::max_bond() const {
  const auto b = bonds();
  return b.empty() ? 1 : *std::max_element(b.begin(), b.end());
}

void Mpo::validate() const {
  chain::validate(sites, 4, "MPO");
  for (const auto& t : sites) {
    if (t.extent(1) != 2 || t.extent(2) != 2) throw ShapeError("MPO: physical legs must have extent 2");
  }
}

Mpo identity_mpo(Index n) {
  Mpo o;
  for (Index k = 0; k < n; ++k) o.sites.push_back(Tensor::identity(2).reshaped({1, 2, 2, 1}));
  return o;
}

namespace {

// Interleave (out..., in...) into (o0, i0, o1, i1, ...) and back.
std::vector<Index> interleave_order(Index n) {
  std::vector<Index> order;
  for (Index k = 0; k < n; ++k) {
    order.push_back(k);
    order.push_back(n + k);
  }
  return order;
}

std::vector<Index> deinterleave_order(Index n) {
  std::vector<Index> order;
  for (Index k = 0; k < n; ++k) order.push_back(2 * k);
  for (Index k = 0; k < n; ++k) order.push_back(2 * k + 1);
  return order;
}

void to_rank4(chain::Sites& s) {
  for (auto& t : s) t = std::move(t).reshaped({t.extent(0), 2, 2, t.extent(2)});
}

}  // namespace

Mpo mpo_from_dense(const CMatrix& op, Index max_bond, double cutoff) {
  if (op.rows() != op.cols()) throw ShapeError("mpo_from_dense expects a square operator");
  const Index n = dense::qubit_count(static_cast<Index>(op.rows()));
  const RowMatrix rm = op;
  const Tensor t = Tensor::from_matrix(rm).reshaped(Shape(2 * n, 2)).permuted(interleave_order(n));
  Mpo o;
  o.sites = chain::tt_svd(t.raw(), n, 4, max_bond, cutoff, o.truncation_error);
  to_rank4(o.sites);
  o.center = n - 1;
  return o;
}

CMatrix to_dense(const Mpo& o) {
  const Index n = o.length();
  const auto flat = chain::to_vector(o.sites);
  const Tensor t = Tensor(Shape(2 * n, 2), flat).permuted(deinterleave_order(n));
  const Index dim = Index{1} << n;
  return CMatrix(t.reshaped({dim, dim}).matrix(1));
}

Mpo adjoint(const Mpo& o) {
  Mpo out;
  out.truncation_error = o.truncation_error;
  out.center = o.center;
  for (const auto& t : o.sites) out.sites.push_back(t.permuted({0, 2, 1, 3}).conj());
  return out;
}

void compress(Mpo& o, Index max_bond, double cutoff) {
  o.truncation_error += chain::compress(o.sites, o.center, max_bond, cutoff);
}

Mps apply_mpo(const Mpo& o, const Mps& s, Index max_bond, double cutoff) {
  if (o.length() != s.length()) throw ShapeError("apply_mpo: lengths differ");
  Mps out;
  double err = 0.0;
  out.sites = chain::zip_build(
      s.length(),
      [&](Index k) {
        const Tensor& w = o.sites[k];
        const Tensor& a = s.sites[k];
        // (wl, out, wr, al, ar) -> (wl, al, out, wr, ar)
        return contract(w, a, {{2, 1}})
            .permuted({0, 3, 1, 2, 4})
            .reshaped({w.extent(0) * a.extent(0), 2, w.extent(3) * a.extent(2)});
      },
      max_bond, cutoff, err);
  out.center = 0;
  out.truncation_error = s.truncation_error + o.truncation_error + err;
  return out;
}

Mpo mpo_product(const Mpo& a, const Mpo& b, Index max_bond, double cutoff) {
  if (a.length() != b.length()) throw ShapeError("mpo_product: lengths differ");
  Mpo out;
  double err = 0.0;
  out.sites = chain::zip_build(
      a.length(),
      [&](Index k) {
        const Tensor& x = a.sites[k];
        const Tensor& y = b.sites[k];
        // (xl, out, xr, yl, in, yr) -> (xl, yl, out, in, xr, yr)
        return contract(x, y, {{2, 1}})
            .permuted({0, 3, 1, 4, 2, 5})
            .reshaped({x.extent(0) * y.extent(0), 2, 2, x.extent(3) * y.extent(3)});
      },
      max_bond, cutoff, err);
  out.center = 0;
  out.truncation_error = a.truncation_error + b.truncation_error + err;
  return out;
}

namespace {

Tensor gate_tensor(const Eigen::Matrix4cd& g) {
  return Tensor::from_matrix(RowMatrix(g)).reshaped({2, 2, 2, 2});
}

bool center_moves_right(const Mpo& o, Index p) { return o.center && *o.center <= p; }

}  // namespace

void apply_gate_left(Mpo& o, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff) {
  const Tensor gt = gate_tensor(g);
  o.truncation_error += chain::update_pair(
      o.sites, o.center, p,
      [&](const Tensor& theta) {
        const Index l = theta.extent(0), r = theta.extent(3);
        const Tensor t6 = theta.reshaped({l, 2, 2, 2, 2, r});
        // (o1', o2', l, i1, i2, r) -> (l, o1', i1, o2', i2, r)
        return contract(gt, t6, {{2, 1}, {3, 3}})
            .permuted({2, 0, 3, 1, 4, 5})
            .reshaped({l, 4, 4, r});
      },
      max_bond, cutoff, center_moves_right(o, p));
}

void apply_gate_right(Mpo& o, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff) {
  const Tensor gt = gate_tensor(g);
  o.truncation_error += chain::update_pair(
      o.sites, o.center, p,
      [&](const Tensor& theta) {
        const Index l = theta.extent(0), r = theta.extent(3);
        const Tensor t6 = theta.reshaped({l, 2, 2, 2, 2, r});
        // (l, o1, o2, r, i1', i2') -> (l, o1, i1', o2, i2', r)
        return contract(t6, gt, {{2, 0}, {4, 1}})
            .permuted({0, 1, 4, 2, 5, 3})
            .reshaped({l, 4, 4, r});
      },
      max_bond, cutoff, center_moves_right(o, p));
}

Mpo pauli_exponential_mpo(const PauliTerm& term, double angle, Index n) {
  const double phi = angle * term.coefficient;
  const cplx c = std::cos(phi);
  const cplx is = cplx(0.0, std::sin(phi));
  Mpo o = identity_mpo(n);
  o.center.reset();
  if (term.ops.empty()) {
    if (n == 0) throw ShapeError("empty register");
    o.sites[0] *= std::exp(cplx(0.0, phi));
    return o;
  }
  const auto [lo, hi] = term.support();
  if (hi >= n) throw ShapeError("Pauli term acts outside the register");
  auto local = [&](Index q) -> Eigen::Matrix2cd {
    auto it = term.ops.find(q);
    Eigen::Matrix2cd m;
    if (it == term.ops.end()) return Eigen::Matrix2cd::Identity();
    switch (it->second) {
      case 'X':
        m << 0, 1, 1, 0;
        break;
      case 'Y':
        m << 0, cplx(0, -1), cplx(0, 1), 0;
        break;
      default:
        m << 1, 0, 0, -1;
        break;
    }
    return m;
  };
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  if (lo == hi) {
    const Eigen::Matrix2cd u = c * id + is * local(lo);
    o.sites[lo] = Tensor::from_matrix(RowMatrix(u)).reshaped({1, 2, 2, 1});
    return o;
  }
  for (Index q = lo; q <= hi; ++q) {
    const Eigen::Matrix2cd p = local(q);
    const Index left = q == lo ? 1 : 2;
    const Index right = q == hi ? 1 : 2;
    Tensor t({left, 2, 2, right});
    for (Index a = 0; a < 2; ++a) {
      for (Index b = 0; b < 2; ++b) {
        const auto ea = static_cast<Eigen::Index>(a), eb = static_cast<Eigen::Index>(b);
        if (q == lo) {
          t.at({0, a, b, 0}) = c * id(ea, eb);
          t.at({0, a, b, 1}) = is * p(ea, eb);
        } else if (q == hi) {
          t.at({0, a, b, 0}) = id(ea, eb);
          t.at({1, a, b, 0}) = p(ea, eb);
        } else {
          t.at({0, a, b, 0}) = id(ea, eb);
          t.at({1, a, b, 1}) = p(ea, eb);
        }
      }
    }
    o.sites[q] = std::move(t);
  }
  return o;
}

cplx trace(const Mpo& o) {
  RowMatrix env = RowMatrix::Identity(1, 1);
  for (const auto& t : o.sites) {
    const Index l = t.extent(0), r = t.extent(3);
    RowMatrix m = RowMatrix::Zero(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
    for (Index i = 0; i < l; ++i)
      for (Index j = 0; j < r; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            t.at({i, 0, 0, j}) + t.at({i, 1, 1, j});
    env = env * m;
  }
  return env(0, 0);
}

double frobenius_norm(const Mpo& o) {
  return std::sqrt(std::max(0.0, chain::overlap(o.sites, o.sites).real()));
}

Mpo prepend_identity(const Mpo& o) {
  Mpo out = o;
  out.sites.insert(out.sites.begin(), Tensor::identity(2).reshaped({1, 2, 2, 1}));
  if (out.center) out.center = *out.center + 1;
  return out;
}

}  // namespace tpde
