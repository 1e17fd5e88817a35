#pragma once

#include "tpde/tensor.hpp"

// Dense gate application on statevectors and operator matrices.
//
// Qubit q of an n-qubit register carries bit weight 2^(n-1-q), so qubit 0 is
// the most significant bit; this matches the row-major flattening of an MPS.
// A two-qubit gate on (p, p+1) is a 4x4 matrix indexed by 2*b_p + b_{p+1}.

namespace tpde::dense {

using Gate = Eigen::Matrix4cd;

Index qubit_count(Index dim);

/// psi <- (I (x) g (x) I) psi with g on qubits (p, p+1).
void apply_gate(CVector& psi, const Gate& g, Index p);
/// Same, acting on every column of a column-major matrix (left multiply).
void apply_gate_left(CMatrix& m, const Gate& g, Index p);
/// m <- m (I (x) g (x) I), the gate acting on the column index.
void apply_gate_right(CMatrix& m, const Gate& g, Index p);
/// Single-qubit gate on qubit q of a statevector.
void apply_single(CVector& psi, const Eigen::Matrix2cd& g, Index q);

/// sum_i conj(a_i) b_i through the active kernel.
cplx dot(const CVector& a, const CVector& b);

/// Full 2^n x 2^n matrix of a gate on (p, p+1).
CMatrix embed(const Gate& g, Index p, Index n);

}  // namespace tpde::dense
