#include "chain.hpp"

#include <cmath>
#include <string>

#include "tpde/errors.hpp"

namespace tpde::chain {

std::vector<Index> bonds(const Sites& s) {
  std::vector<Index> out;
  for (Index k = 0; k + 1 < s.size(); ++k) out.push_back(s[k].shape().back());
  return out;
}

void validate(const Sites& s, Index rank, const char* what) {
  for (Index k = 0; k < s.size(); ++k) {
    if (s[k].rank() != rank) throw ShapeError(std::string(what) + ": site tensor has wrong rank");
    if (k == 0 && s[k].extent(0) != 1) throw ShapeError(std::string(what) + ": left boundary bond must be 1");
    if (k + 1 == s.size() && s[k].shape().back() != 1) {
      throw ShapeError(std::string(what) + ": right boundary bond must be 1");
    }
    if (k > 0 && s[k - 1].shape().back() != s[k].extent(0)) {
      throw ShapeError(std::string(what) + ": adjacent bonds do not match");
    }
  }
}

namespace {

Index flat_d(const Tensor& t) { return t.size() / (t.extent(0) * t.shape().back()); }

Tensor as3(const Tensor& t) { return t.reshaped({t.extent(0), flat_d(t), t.shape().back()}); }

// Restore the caller's site rank (3 for MPS, 4 for MPO) after a rank-3 edit.
Tensor like(const Tensor& proto, Tensor t) {
  if (proto.rank() == 3) return t;
  Shape shape = proto.shape();
  shape.front() = t.extent(0);
  shape.back() = t.shape().back();
  return std::move(t).reshaped(shape);
}

}  // namespace

void shift_right(Sites& s, Index k) {
  const Tensor a = as3(s[k]);
  const Index l = a.extent(0), d = a.extent(1), r = a.extent(2);
  RowMatrix q, rr;
  linalg::qr(a.matrix(2), q, rr);
  const Index kk = static_cast<Index>(q.cols());
  s[k] = like(s[k], Tensor::from_matrix(q).reshaped({l, d, kk}));
  const Tensor b = as3(s[k + 1]);
  const RowMatrix next = rr * b.matrix(1);
  s[k + 1] = like(s[k + 1], Tensor::from_matrix(next).reshaped({kk, b.extent(1), b.extent(2)}));
  (void)r;
}

void shift_left(Sites& s, Index k) {
  const Tensor a = as3(s[k]);
  const Index d = a.extent(1), r = a.extent(2);
  RowMatrix l, q;
  linalg::lq(a.matrix(1), l, q);
  const Index kk = static_cast<Index>(q.rows());
  s[k] = like(s[k], Tensor::from_matrix(q).reshaped({kk, d, r}));
  const Tensor b = as3(s[k - 1]);
  const RowMatrix prev = b.matrix(2) * l;
  s[k - 1] = like(s[k - 1], Tensor::from_matrix(prev).reshaped({b.extent(0), b.extent(1), kk}));
}

void move_center(Sites& s, std::optional<Index>& center, Index target) {
  if (target >= s.size()) throw ShapeError("canonical centre outside the chain");
  if (!center) {
    for (Index k = 0; k < target; ++k) shift_right(s, k);
    for (Index k = s.size() - 1; k > target; --k) shift_left(s, k);
  } else {
    for (Index k = *center; k < target; ++k) shift_right(s, k);
    for (Index k = *center; k > target; --k) shift_left(s, k);
  }
  center = target;
}

double truncate_sweep(Sites& s, Index max_bond, double cutoff) {
  double error = 0.0;
  for (Index k = s.size() - 1; k > 0; --k) {
    const Tensor a = as3(s[k]);
    const Index d = a.extent(1), r = a.extent(2);
    auto dec = linalg::svd(a.matrix(1));
    const Index keep = linalg::kept_count(dec.s, max_bond, cutoff);
    double dropped = 0.0;
    for (Index i = keep; i < dec.s.size(); ++i) dropped += dec.s[i] * dec.s[i];
    error += std::sqrt(dropped);
    const auto ek = static_cast<Eigen::Index>(keep);
    s[k] = like(s[k], Tensor::from_matrix(dec.vdag.topRows(ek)).reshaped({keep, d, r}));
    RowMatrix us = dec.u.leftCols(ek);
    for (Index i = 0; i < keep; ++i) us.col(static_cast<Eigen::Index>(i)) *= dec.s[i];
    const Tensor b = as3(s[k - 1]);
    const RowMatrix prev = b.matrix(2) * us;
    s[k - 1] = like(s[k - 1], Tensor::from_matrix(prev).reshaped({b.extent(0), b.extent(1), keep}));
  }
  return error;
}

double compress(Sites& s, std::optional<Index>& center, Index max_bond, double cutoff) {
  if (s.empty()) return 0.0;
  move_center(s, center, s.size() - 1);
  const double err = truncate_sweep(s, max_bond, cutoff);
  center = 0;
  return err;
}

Sites zip_build(Index n, const std::function<Tensor(Index)>& site, Index max_bond, double cutoff,
                double& error) {
  Sites out(n);
  RowMatrix carry = RowMatrix::Identity(1, 1);
  for (Index k = 0; k < n; ++k) {
    const Tensor raw = site(k);
    const Tensor a = as3(raw);
    const Index d = a.extent(1), r = a.extent(2);
    const RowMatrix m = carry * a.matrix(1);
    const Index l = static_cast<Index>(m.rows());
    if (k + 1 == n) {
      out[k] = like(raw, Tensor::from_matrix(m).reshaped({l, d, r}));
      break;
    }
    RowMatrix q, rr;
    const RowMatrix m2 = Eigen::Map<const RowMatrix>(m.data(), static_cast<Eigen::Index>(l * d),
                                                     static_cast<Eigen::Index>(r));
    linalg::qr(m2, q, rr);
    out[k] = like(raw, Tensor::from_matrix(q).reshaped({l, d, static_cast<Index>(q.cols())}));
    carry = rr;
  }
  error = n > 0 ? truncate_sweep(out, max_bond, cutoff) : 0.0;
  return out;
}

double update_pair(Sites& s, std::optional<Index>& center, Index p,
                   const std::function<Tensor(const Tensor&)>& f, Index max_bond, double cutoff,
                   bool center_right) {
  if (p + 1 >= s.size()) throw ShapeError("two-site update outside the chain");
  if (!center || (*center != p && *center != p + 1)) move_center(s, center, p);
  const Tensor a = as3(s[p]);
  const Tensor b = as3(s[p + 1]);
  const Index l = a.extent(0), d1 = a.extent(1), d2 = b.extent(1), r = b.extent(2);
  Tensor theta = contract(a, b, {{2, 0}});  // (l, d1, d2, r)
  theta = f(theta);
  if (theta.shape() != Shape{l, d1, d2, r}) throw ShapeError("two-site map changed the legs");
  auto dec = linalg::svd(theta.matrix(2));
  const Index keep = linalg::kept_count(dec.s, max_bond, cutoff);
  double dropped = 0.0;
  for (Index i = keep; i < dec.s.size(); ++i) dropped += dec.s[i] * dec.s[i];
  const auto ek = static_cast<Eigen::Index>(keep);
  RowMatrix u = dec.u.leftCols(ek);
  RowMatrix v = dec.vdag.topRows(ek);
  for (Index i = 0; i < keep; ++i) {
    if (center_right) {
      v.row(static_cast<Eigen::Index>(i)) *= dec.s[i];
    } else {
      u.col(static_cast<Eigen::Index>(i)) *= dec.s[i];
    }
  }
  s[p] = like(s[p], Tensor::from_matrix(u).reshaped({l, d1, keep}));
  s[p + 1] = like(s[p + 1], Tensor::from_matrix(v).reshaped({keep, d2, r}));
  center = center_right ? p + 1 : p;
  return std::sqrt(dropped);
}

Sites tt_svd(const cplx* data, Index n, Index d, Index max_bond, double cutoff, double& error) {
  Index total = 1;
  for (Index k = 0; k < n; ++k) total *= d;
  Sites out(n);
  error = 0.0;
  RowMatrix rest = Eigen::Map<const RowMatrix>(data, 1, static_cast<Eigen::Index>(total));
  for (Index k = 0; k + 1 < n; ++k) {
    const Index l = static_cast<Index>(rest.rows());
    const Index cols = static_cast<Index>(rest.cols()) / d;
    const RowMatrix m = Eigen::Map<const RowMatrix>(rest.data(), static_cast<Eigen::Index>(l * d),
                                                    static_cast<Eigen::Index>(cols));
    auto dec = linalg::svd(m);
    const Index keep = linalg::kept_count(dec.s, max_bond, cutoff);
    double dropped = 0.0;
    for (Index i = keep; i < dec.s.size(); ++i) dropped += dec.s[i] * dec.s[i];
    error += std::sqrt(dropped);
    const auto ek = static_cast<Eigen::Index>(keep);
    out[k] = Tensor::from_matrix(dec.u.leftCols(ek)).reshaped({l, d, keep});
    rest = dec.vdag.topRows(ek);
    for (Index i = 0; i < keep; ++i) rest.row(static_cast<Eigen::Index>(i)) *= dec.s[i];
  }
  if (n > 0) {
    out[n - 1] = Tensor::from_matrix(rest).reshaped({static_cast<Index>(rest.rows()), d, 1});
  }
  return out;
}

std::vector<cplx> to_vector(const Sites& s) {
  RowMatrix acc = RowMatrix::Identity(1, 1);
  for (const auto& site : s) {
    const Tensor a = as3(site);
    const RowMatrix next = acc * a.matrix(1);
    acc = Eigen::Map<const RowMatrix>(next.data(),
                                      next.rows() * static_cast<Eigen::Index>(a.extent(1)),
                                      static_cast<Eigen::Index>(a.extent(2)));
  }
  return std::vector<cplx>(acc.data(), acc.data() + acc.size());
}

cplx overlap(const Sites& a, const Sites& b) {
  if (a.size() != b.size()) throw ShapeError("overlap: chain length mismatch");
  if (a.empty()) return 1.0;
  Tensor env = Tensor::identity(1);
  for (Index k = 0; k < a.size(); ++k) {
    const Tensor x = as3(a[k]);
    const Tensor y = as3(b[k]);
    const Tensor t = contract(env, y, {{1, 0}});             // (la, d, rb)
    env = contract(x.conj(), t, {{0, 0}, {1, 1}});           // (ra, rb)
  }
  return env[0];
}

}  // namespace tpde::chain
