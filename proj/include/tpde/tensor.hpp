#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tpde {

using cplx = std::complex<double>;
using Index = std::size_t;
using Shape = std::vector<Index>;

inline constexpr Index kUnboundedBond = std::numeric_limits<Index>::max();

/// Column-major complex matrix used for operators and state vectors.
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

/// Dense complex array with row-major (last index fastest) layout.
///
/// Every reshape and permute in the library is defined against this layout:
/// the flat offset of (i_0, ..., i_{r-1}) is sum_k i_k * stride_k with
/// stride_{r-1} = 1.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<cplx> data);

  static Tensor from_matrix(const RowMatrix& m);
  static Tensor identity(Index n);

  const Shape& shape() const { return shape_; }
  Index rank() const { return shape_.size(); }
  Index size() const { return data_.size(); }
  Index extent(Index axis) const { return shape_.at(axis); }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  cplx* raw() { return data_.data(); }
  const cplx* raw() const { return data_.data(); }

  cplx& operator[](Index flat) { return data_[flat]; }
  const cplx& operator[](Index flat) const { return data_[flat]; }
  cplx& at(std::initializer_list<Index> idx);
  const cplx& at(std::initializer_list<Index> idx) const;

  /// Same data, new shape; the product of extents must be unchanged.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;
  Tensor permuted(std::span<const Index> axes) const;
  Tensor permuted(std::initializer_list<Index> axes) const {
    return permuted(std::span<const Index>(axes.begin(), axes.size()));
  }
  Tensor conj() const;

  /// Row-major matrix view grouping the first `left_axes` axes as rows.
  RowMap matrix(Index left_axes);
  ConstRowMap matrix(Index left_axes) const;

  double norm() const;
  bool all_finite() const;

  Tensor& operator*=(cplx s);
  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  friend Tensor operator*(cplx s, Tensor t) { return t *= s; }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }

 private:
  Index flat_index(std::initializer_list<Index> idx) const;

  Shape shape_;
  std::vector<cplx> data_;
};

Index shape_product(std::span<const Index> shape);

/// Sums over the paired axes (axis of a, axis of b). The result carries the
/// unpaired axes of `a` in order, followed by the unpaired axes of `b`.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<Index, Index>> axis_pairs);
inline Tensor contract(const Tensor& a, const Tensor& b,
                       std::initializer_list<std::pair<Index, Index>> axis_pairs) {
  return contract(a, b, std::span<const std::pair<Index, Index>>(axis_pairs.begin(),
                                                                  axis_pairs.size()));
}

struct SvdResult {
  Tensor u;                 ///< (left extents..., k), orthonormal columns
  std::vector<double> s;    ///< descending, k entries
  Tensor vdag;              ///< (k, right extents...), orthonormal rows
  double truncation_error = 0.0;  ///< sqrt of the discarded squared weight

  Index bond() const { return s.size(); }
};

/// Singular values with s_k / s_0 <= cutoff are dropped, then at most
/// `max_bond` are kept. At least one value always survives.
SvdResult truncated_svd(const Tensor& t, std::span<const Index> left_axes, Index max_bond,
                        double cutoff);
inline SvdResult truncated_svd(const Tensor& t, std::initializer_list<Index> left_axes,
                               Index max_bond, double cutoff) {
  return truncated_svd(t, std::span<const Index>(left_axes.begin(), left_axes.size()),
                       max_bond, cutoff);
}

/// UV^dagger of g = U S V^dagger. Throws DegenerateError if g is rank deficient.
Tensor polar_unitary(const Tensor& g);

namespace linalg {

struct MatrixSvd {
  RowMatrix u;
  std::vector<double> s;
  RowMatrix vdag;
};

/// Thin SVD of a row-major matrix (LAPACK divide and conquer, with the QR
/// iteration driver as fallback).
MatrixSvd svd(const RowMatrix& a);

/// Number of singular values retained under the relative-cutoff rule.
Index kept_count(std::span<const double> s, Index max_bond, double cutoff);

/// Thin QR: a = q r with q (m x k) orthonormal columns, r (k x n).
void qr(const RowMatrix& a, RowMatrix& q, RowMatrix& r);
/// Thin LQ: a = l q with q (k x n) orthonormal rows.
void lq(const RowMatrix& a, RowMatrix& l, RowMatrix& q);

/// Unitary polar factor; `allow_rank_deficient` completes the null space with
/// the singular vectors returned by the decomposition instead of throwing.
CMatrix polar(const CMatrix& g, bool allow_rank_deficient);

/// exp(factor * h) for Hermitian h, through its eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, cplx factor);

}  // namespace linalg

}  // namespace tpde
