#pragma once

#include <vector>

#include "tpde/hubbard.hpp"
#include "tpde/mps.hpp"

namespace tpde {

/// Matrix product operator with site legs (left bond, out 2, in 2, right bond).
struct Mpo {
  std::vector<Tensor> sites;
  std::optional<Index> center;
  double truncation_error = 0.0;

  Index length() const { return sites.size(); }
  std::vector<Index> bonds() const;
  Index max_bond() const;
  void validate() const;
};

Mpo identity_mpo(Index n);
/// TT-SVD of a 2^n x 2^n operator.
Mpo mpo_from_dense(const CMatrix& op, Index max_bond = kUnboundedBond, double cutoff = 0.0);
CMatrix to_dense(const Mpo& o);

Mpo adjoint(const Mpo& o);
/// Truncating sweep on an MPO viewed as a chain with physical dimension 4.
void compress(Mpo& o, Index max_bond, double cutoff);

/// o|s>, applied exactly and then compressed.
Mps apply_mpo(const Mpo& o, const Mps& s, Index max_bond, double cutoff);
/// a * b, formed exactly and then compressed.
Mpo mpo_product(const Mpo& a, const Mpo& b, Index max_bond, double cutoff);

/// o <- (g on p, p+1) * o
void apply_gate_left(Mpo& o, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff);
/// o <- o * (g on p, p+1)
void apply_gate_right(Mpo& o, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff);

/// exp(i angle C P) as a bond-2 MPO over the term's support (identity elsewhere).
Mpo pauli_exponential_mpo(const PauliTerm& term, double angle, Index n);

cplx trace(const Mpo& o);
/// ||o||_F through the transfer contraction of o with its conjugate.
double frobenius_norm(const Mpo& o);

/// Puts an idle qubit (identity site) in front of the operator.
Mpo prepend_identity(const Mpo& o);

}  // namespace tpde
