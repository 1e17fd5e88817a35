#include "tpde/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "tpde/errors.hpp"

namespace tpde {

Index shape_product(std::span<const Index> shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_product(shape_)) {}

Tensor::Tensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw ShapeError("tensor data size does not match shape");
  }
}

Tensor Tensor::from_matrix(const RowMatrix& m) {
  Tensor t({static_cast<Index>(m.rows()), static_cast<Index>(m.cols())});
  RowMap(t.raw(), m.rows(), m.cols()) = m;
  return t;
}

Tensor Tensor::identity(Index n) {
  Tensor t({n, n});
  for (Index i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

Index Tensor::flat_index(std::initializer_list<Index> idx) const {
  if (idx.size() != shape_.size()) throw ShapeError("index rank mismatch");
  Index flat = 0;
  Index k = 0;
  for (Index i : idx) {
    if (i >= shape_[k]) throw ShapeError("index out of range");
    flat = flat * shape_[k] + i;
    ++k;
  }
  return flat;
}

cplx& Tensor::at(std::initializer_list<Index> idx) { return data_[flat_index(idx)]; }
const cplx& Tensor::at(std::initializer_list<Index> idx) const {
  return data_[flat_index(idx)];
}

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  if (shape_product(shape) != data_.size()) {
    throw ShapeError("reshape changes the number of entries");
  }
  shape_ = std::move(shape);
  return std::move(*this);
}

Tensor Tensor::permuted(std::span<const Index> axes) const {
  const Index r = rank();
  if (axes.size() != r) throw ShapeError("permutation rank mismatch");
  std::vector<bool> seen(r, false);
  for (Index a : axes) {
    if (a >= r || seen[a]) throw ShapeError("invalid permutation");
    seen[a] = true;
  }
  bool trivial = true;
  for (Index k = 0; k < r; ++k) trivial = trivial && axes[k] == k;
  if (trivial) return *this;

  std::vector<Index> in_stride(r, 1);
  for (Index k = r; k-- > 1;) in_stride[k - 1] = in_stride[k] * shape_[k];
  Shape out_shape(r);
  std::vector<Index> stride(r);
  for (Index k = 0; k < r; ++k) {
    out_shape[k] = shape_[axes[k]];
    stride[k] = in_stride[axes[k]];
  }
  Tensor out(out_shape);
  if (out.size() == 0) return out;

  // Odometer over output indices; the innermost axis is unrolled.
  std::vector<Index> counter(r, 0);
  const Index inner = out_shape[r - 1];
  const Index inner_stride = stride[r - 1];
  Index src = 0;
  cplx* dst = out.raw();
  const Index outer = out.size() / inner;
  for (Index o = 0; o < outer; ++o) {
    const cplx* p = data_.data() + src;
    for (Index i = 0; i < inner; ++i) dst[i] = p[i * inner_stride];
    dst += inner;
    for (Index k = r - 1; k-- > 0;) {
      ++counter[k];
      src += stride[k];
      if (counter[k] < out_shape[k]) break;
      src -= stride[k] * out_shape[k];
      counter[k] = 0;
    }
  }
  return out;
}

Tensor Tensor::conj() const {
  Tensor out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

RowMap Tensor::matrix(Index left_axes) {
  const Index rows = shape_product(std::span<const Index>(shape_).first(left_axes));
  return RowMap(data_.data(), static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(rows == 0 ? 0 : data_.size() / rows));
}

ConstRowMap Tensor::matrix(Index left_axes) const {
  const Index rows = shape_product(std::span<const Index>(shape_).first(left_axes));
  return ConstRowMap(data_.data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(rows == 0 ? 0 : data_.size() / rows));
}

double Tensor::norm() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

Tensor& Tensor::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (o.shape_ != shape_) throw ShapeError("tensor sum shape mismatch");
  for (Index i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (o.shape_ != shape_) throw ShapeError("tensor difference shape mismatch");
  for (Index i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<Index, Index>> axis_pairs) {
  std::vector<bool> a_paired(a.rank(), false), b_paired(b.rank(), false);
  for (auto [ia, ib] : axis_pairs) {
    if (ia >= a.rank() || ib >= b.rank() || a_paired[ia] || b_paired[ib]) {
      throw ShapeError("contract: invalid axis pair");
    }
    if (a.extent(ia) != b.extent(ib)) {
      throw ShapeError("contract: extent mismatch on paired axes (" +
                       std::to_string(a.extent(ia)) + " vs " + std::to_string(b.extent(ib)) +
                       ")");
    }
    a_paired[ia] = b_paired[ib] = true;
  }
  std::vector<Index> a_order, b_order;
  Shape out_shape;
  Index m = 1, n = 1, k = 1;
  for (Index i = 0; i < a.rank(); ++i) {
    if (!a_paired[i]) {
      a_order.push_back(i);
      out_shape.push_back(a.extent(i));
      m *= a.extent(i);
    }
  }
  for (auto [ia, ib] : axis_pairs) {
    a_order.push_back(ia);
    b_order.push_back(ib);
    k *= a.extent(ia);
  }
  for (Index i = 0; i < b.rank(); ++i) {
    if (!b_paired[i]) {
      b_order.push_back(i);
      out_shape.push_back(b.extent(i));
      n *= b.extent(i);
    }
  }
  const Tensor ap = a.permuted(a_order);
  const Tensor bp = b.permuted(b_order);
  Tensor out(out_shape);
  const auto em = static_cast<Eigen::Index>(m);
  const auto en = static_cast<Eigen::Index>(n);
  const auto ek = static_cast<Eigen::Index>(k);
  RowMap(out.raw(), em, en).noalias() =
      ConstRowMap(ap.raw(), em, ek) * ConstRowMap(bp.raw(), ek, en);
  return out;
}

namespace linalg {

MatrixSvd svd(const RowMatrix& a_in) {
  const auto m = static_cast<lapack_int>(a_in.rows());
  const auto n = static_cast<lapack_int>(a_in.cols());
  const lapack_int k = std::min(m, n);
  MatrixSvd out;
  out.u.resize(m, k);
  out.vdag.resize(k, n);
  out.s.assign(k, 0.0);
  if (k == 0) return out;

  RowMatrix a = a_in;
  auto* ap = reinterpret_cast<lapack_complex_double*>(a.data());
  auto* up = reinterpret_cast<lapack_complex_double*>(out.u.data());
  auto* vp = reinterpret_cast<lapack_complex_double*>(out.vdag.data());
  lapack_int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'S', m, n, ap, n, out.s.data(), up, k,
                                   vp, n);
  if (info != 0) {
    a = a_in;
    std::vector<double> superb(static_cast<Index>(k));
    info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S', m, n, ap, n, out.s.data(), up, k, vp, n,
                          superb.data());
    if (info != 0) throw DegenerateError("SVD failed to converge");
  }
  return out;
}

Index kept_count(std::span<const double> s, Index max_bond, double cutoff) {
  if (s.empty()) return 0;
  Index keep = 1;
  while (keep < s.size() && s[keep] > cutoff * s[0]) ++keep;
  return std::min(keep, std::max<Index>(max_bond, 1));
}

void qr(const RowMatrix& a, RowMatrix& q, RowMatrix& r) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  RowMatrix work = a;
  std::vector<cplx> tau(static_cast<Index>(std::max<lapack_int>(k, 1)));
  auto* wp = reinterpret_cast<lapack_complex_double*>(work.data());
  auto* tp = reinterpret_cast<lapack_complex_double*>(tau.data());
  if (k > 0 && LAPACKE_zgeqrf(LAPACK_ROW_MAJOR, m, n, wp, n, tp) != 0) {
    throw DegenerateError("QR factorization failed");
  }
  r = work.topRows(k).triangularView<Eigen::Upper>();
  q = work.leftCols(k);
  auto* qp = reinterpret_cast<lapack_complex_double*>(q.data());
  if (k > 0 && LAPACKE_zungqr(LAPACK_ROW_MAJOR, m, k, k, qp, k, tp) != 0) {
    throw DegenerateError("QR orthogonal factor failed");
  }
}

void lq(const RowMatrix& a, RowMatrix& l, RowMatrix& q) {
  RowMatrix qt, rt;
  qr(a.adjoint(), qt, rt);
  l = rt.adjoint();
  q = qt.adjoint();
}

CMatrix polar(const CMatrix& g, bool allow_rank_deficient) {
  if (g.rows() != g.cols()) throw ShapeError("polar factor requires a square matrix");
  Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) throw DegenerateError("polar factor of a zero matrix");
  if (!allow_rank_deficient && s(s.size() - 1) <= 1e-13 * s(0)) {
    throw DegenerateError("polar factor of a rank-deficient matrix is not unique");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix expm_hermitian(const CMatrix& h, cplx factor) {
  if (h.rows() != h.cols()) throw ShapeError("expm_hermitian requires a square matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const auto& v = eig.eigenvectors();
  CVector phase(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phase(i) = std::exp(factor * eig.eigenvalues()(i));
  return v * phase.asDiagonal() * v.adjoint();
}

}  // namespace linalg

SvdResult truncated_svd(const Tensor& t, std::span<const Index> left_axes, Index max_bond,
                        double cutoff) {
  const Index r = t.rank();
  if (left_axes.empty() || left_axes.size() >= r) {
    throw ShapeError("truncated_svd: split must leave both groups non-empty");
  }
  std::vector<bool> is_left(r, false);
  for (Index a : left_axes) {
    if (a >= r || is_left[a]) throw ShapeError("truncated_svd: invalid split");
    is_left[a] = true;
  }
  std::vector<Index> order(left_axes.begin(), left_axes.end());
  Shape left_shape, right_shape;
  for (Index a : left_axes) left_shape.push_back(t.extent(a));
  for (Index a = 0; a < r; ++a) {
    if (!is_left[a]) {
      order.push_back(a);
      right_shape.push_back(t.extent(a));
    }
  }
  const Tensor p = t.permuted(order);
  if (p.norm() == 0.0) {
    throw DegenerateError("truncated_svd: singular spectrum is identically zero");
  }
  const Index rows = shape_product(left_shape);
  const Index cols = shape_product(right_shape);
  auto dec = linalg::svd(ConstRowMap(p.raw(), static_cast<Eigen::Index>(rows),
                                     static_cast<Eigen::Index>(cols)));
  const Index keep = linalg::kept_count(dec.s, max_bond, cutoff);

  SvdResult out;
  double discarded = 0.0;
  for (Index i = keep; i < dec.s.size(); ++i) discarded += dec.s[i] * dec.s[i];
  out.truncation_error = std::sqrt(discarded);
  out.s.assign(dec.s.begin(), dec.s.begin() + static_cast<std::ptrdiff_t>(keep));
  left_shape.push_back(keep);
  right_shape.insert(right_shape.begin(), keep);
  out.u = Tensor::from_matrix(dec.u.leftCols(static_cast<Eigen::Index>(keep)))
              .reshaped(left_shape);
  out.vdag = Tensor::from_matrix(dec.vdag.topRows(static_cast<Eigen::Index>(keep)))
                 .reshaped(right_shape);
  return out;
}

Tensor polar_unitary(const Tensor& g) {
  if (g.rank() != 2 || g.extent(0) != g.extent(1)) {
    throw ShapeError("polar_unitary expects a square matrix");
  }
  const CMatrix w = linalg::polar(CMatrix(g.matrix(1)), false);
  return Tensor::from_matrix(w);
}

}  // namespace tpde
