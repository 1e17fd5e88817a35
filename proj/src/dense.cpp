#include "tpde/dense.hpp"

#include <bit>

#include "tpde/errors.hpp"
#include "tpde/kernels.hpp"

namespace tpde::dense {

Index qubit_count(Index dim) {
  if (dim == 0 || !std::has_single_bit(dim)) throw ShapeError("dimension is not a power of two");
  return static_cast<Index>(std::countr_zero(dim));
}

namespace {

void check_pair(Index p, Index n) {
  if (n < 2 || p + 1 >= n) throw ShapeError("gate position outside the register");
}

}  // namespace

void apply_gate(CVector& psi, const Gate& g, Index p) {
  const Index n = qubit_count(static_cast<Index>(psi.size()));
  check_pair(p, n);
  const RowMatrix gr = g;
  kernels::active().apply4(gr.data(), psi.data(), Index{1} << p, Index{1} << (n - 2 - p));
}

void apply_gate_left(CMatrix& m, const Gate& g, Index p) {
  const Index n = qubit_count(static_cast<Index>(m.rows()));
  check_pair(p, n);
  const RowMatrix gr = g;
  kernels::active().apply4(gr.data(), m.data(), static_cast<Index>(m.cols()) << p,
                           Index{1} << (n - 2 - p));
}

void apply_gate_right(CMatrix& m, const Gate& g, Index p) {
  const Index n = qubit_count(static_cast<Index>(m.cols()));
  check_pair(p, n);
  const RowMatrix gt = g.transpose();
  kernels::active().apply4(gt.data(), m.data(), Index{1} << p,
                           (Index{1} << (n - 2 - p)) * static_cast<Index>(m.rows()));
}

void apply_single(CVector& psi, const Eigen::Matrix2cd& g, Index q) {
  const Index n = qubit_count(static_cast<Index>(psi.size()));
  if (q >= n) throw ShapeError("qubit outside the register");
  const Eigen::Matrix<cplx, 2, 2, Eigen::RowMajor> gr = g;
  kernels::active().apply2(gr.data(), psi.data(), Index{1} << q, Index{1} << (n - 1 - q));
}

cplx dot(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  return kernels::active().dotc(a.data(), b.data(), static_cast<Index>(a.size()));
}

CMatrix embed(const Gate& g, Index p, Index n) {
  CMatrix m = CMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  apply_gate_left(m, g, p);
  return m;
}

}  // namespace tpde::dense
