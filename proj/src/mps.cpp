#include "tpde/mps.hpp"

#include <algorithm>
#include <cmath>

#include "chain.hpp"
#include "tpde/dense.hpp"
#include "tpde/errors.hpp"

namespace tpde {

std::vector<Index> Mps::bonds() const { return chain::bonds(sites); }

Index Mps::max_bond() const {
  const auto b = bonds();
  return b.empty() ? 1 : *std::max_element(b.begin(), b.end());
}

void Mps::validate() const {
  chain::validate(sites, 3, "MPS");
  for (const auto& t : sites) {
    if (t.extent(1) != 2) throw ShapeError("MPS: physical leg must have extent 2");
  }
}

Mps product_state(const std::vector<int>& bits) {
  Mps s;
  for (int b : bits) {
    Tensor t({1, 2, 1});
    t[b ? 1 : 0] = 1.0;
    s.sites.push_back(std::move(t));
  }
  if (!bits.empty()) s.center = 0;
  return s;
}

Mps statevector_to_mps(const CVector& v, Index max_bond, double cutoff) {
  const Index n = dense::qubit_count(static_cast<Index>(v.size()));
  Mps s;
  s.sites = chain::tt_svd(v.data(), n, 2, max_bond, cutoff, s.truncation_error);
  s.center = n - 1;
  return s;
}

CVector to_statevector(const Mps& s) {
  const auto flat = chain::to_vector(s.sites);
  return Eigen::Map<const CVector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

cplx inner(const Mps& a, const Mps& b) {
  if (a.length() != b.length()) throw ShapeError("inner: MPS lengths differ");
  return chain::overlap(a.sites, b.sites);
}

double norm(const Mps& s) {
  if (s.center) return s.sites[*s.center].norm();
  return std::sqrt(std::max(0.0, inner(s, s).real()));
}

void normalize(Mps& s) {
  if (s.sites.empty()) return;
  if (!s.center) chain::move_center(s.sites, s.center, 0);
  const double nrm = s.sites[*s.center].norm();
  if (nrm == 0.0) throw DegenerateError("cannot normalize a zero state");
  s.sites[*s.center] *= 1.0 / nrm;
}

void canonicalize(Mps& s, Index site) { chain::move_center(s.sites, s.center, site); }

void compress(Mps& s, Index max_bond, double cutoff) {
  s.truncation_error += chain::compress(s.sites, s.center, max_bond, cutoff);
}

void apply_two_site(Mps& s, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff) {
  const Tensor gt = Tensor::from_matrix(RowMatrix(g)).reshaped({2, 2, 2, 2});
  const bool right = s.center && *s.center <= p;
  s.truncation_error += chain::update_pair(
      s.sites, s.center, p,
      [&](const Tensor& theta) {
        return contract(gt, theta, {{2, 1}, {3, 2}}).permuted({2, 0, 1, 3});
      },
      max_bond, cutoff, right);
}

void apply_single_site(Mps& s, const Eigen::Matrix2cd& g, Index q) {
  if (q >= s.length()) throw ShapeError("single-site gate outside the chain");
  const Tensor gt = Tensor::from_matrix(RowMatrix(g));
  s.sites[q] = contract(gt, s.sites[q], {{1, 1}}).permuted({1, 0, 2});
  const bool unitary = (g.adjoint() * g - Eigen::Matrix2cd::Identity()).norm() < 1e-12;
  if (!unitary) s.center.reset();
}

Mps superpose_ancilla(const Mps& g, const Mps& e, Index max_bond, double cutoff) {
  if (g.length() != e.length() || g.length() == 0) {
    throw ShapeError("superpose_ancilla: branch states must have equal, non-zero length");
  }
  const Index n = g.length();
  Mps out;
  Tensor anc({1, 2, 2});
  anc.at({0, 0, 0}) = 1.0;
  anc.at({0, 1, 1}) = 1.0;
  out.sites.push_back(std::move(anc));
  for (Index k = 0; k < n; ++k) {
    const Tensor& a = g.sites[k];
    const Tensor& b = e.sites[k];
    const bool last = k + 1 == n;
    const Index la = a.extent(0), lb = b.extent(0);
    const Index ra = a.extent(2), rb = b.extent(2);
    const Index cols = last ? 1 : ra + rb;
    const Index col_off = last ? 0 : ra;
    Tensor t({la + lb, 2, cols});
    for (Index i = 0; i < la; ++i)
      for (Index p = 0; p < 2; ++p)
        for (Index j = 0; j < ra; ++j) t.at({i, p, j}) = a.at({i, p, j});
    for (Index i = 0; i < lb; ++i)
      for (Index p = 0; p < 2; ++p)
        for (Index j = 0; j < rb; ++j) t.at({la + i, p, col_off + j}) += b.at({i, p, j});
    out.sites.push_back(std::move(t));
  }
  compress(out, max_bond, cutoff);
  canonicalize(out, out.length() - 1);
  normalize(out);
  return out;
}

Mps project_site(const Mps& s, Index site, int bit) {
  if (s.length() < 2) throw ShapeError("project_site needs at least two sites");
  if (site >= s.length()) throw ShapeError("project_site: site outside the chain");
  const Tensor& a = s.sites[site];
  const Index l = a.extent(0), r = a.extent(2);
  RowMatrix m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(r));
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < r; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a.at({i, static_cast<Index>(bit), j});
  Mps out;
  out.truncation_error = s.truncation_error;
  for (Index k = 0; k < s.length(); ++k) {
    if (k != site) out.sites.push_back(s.sites[k]);
  }
  if (site + 1 < s.length()) {
    Tensor& next = out.sites[site];
    const RowMatrix merged = m * next.matrix(1);
    next = Tensor::from_matrix(merged).reshaped({l, 2, next.extent(2)});
  } else {
    Tensor& prev = out.sites[site - 1];
    const RowMatrix merged = prev.matrix(2) * m;
    prev = Tensor::from_matrix(merged).reshaped({prev.extent(0), 2, r});
  }
  return out;
}

}  // namespace tpde
