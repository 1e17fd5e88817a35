#pragma once

#include <optional>
#include <vector>

#include "tpde/tensor.hpp"

namespace tpde {

/// Open-boundary matrix product state. Site tensors have legs
/// (left bond, physical 2, right bond); site 0 is the most significant qubit.
struct Mps {
  std::vector<Tensor> sites;
  /// Site holding the norm when every other site is an isometry.
  std::optional<Index> center;
  /// Accumulated truncation bound of the operations that produced this state.
  double truncation_error = 0.0;

  Index length() const { return sites.size(); }
  /// Extents of the n-1 internal bonds.
  std::vector<Index> bonds() const;
  Index max_bond() const;
  /// Throws ShapeError if the legs do not chain up.
  void validate() const;
};

Mps product_state(const std::vector<int>& bits);
inline Mps zero_state(Index n) { return product_state(std::vector<int>(n, 0)); }

/// Exact (cutoff 0) or truncated TT-SVD of a dense vector of length 2^n.
Mps statevector_to_mps(const CVector& v, Index max_bond = kUnboundedBond, double cutoff = 0.0);
CVector to_statevector(const Mps& s);

/// <a|b>
cplx inner(const Mps& a, const Mps& b);
double norm(const Mps& s);
void normalize(Mps& s);

/// Gauge the state so that `site` is the orthogonality centre.
void canonicalize(Mps& s, Index site);
/// Left-canonical sweep followed by a truncating right-to-left SVD sweep.
void compress(Mps& s, Index max_bond, double cutoff);

/// Two-qubit gate on (p, p+1); gate index 2*b_p + b_{p+1}.
void apply_two_site(Mps& s, const Eigen::Matrix4cd& g, Index p, Index max_bond, double cutoff);
void apply_single_site(Mps& s, const Eigen::Matrix2cd& g, Index q);

/// (|0>|g> + |1>|e>) / norm with the ancilla as site 0; the result is
/// left-orthogonalized and normalized.
Mps superpose_ancilla(const Mps& g, const Mps& e, Index max_bond = kUnboundedBond,
                      double cutoff = 0.0);

/// (<bit| (x) I) on `site`; the result has one fewer site and is not normalized.
Mps project_site(const Mps& s, Index site, int bit);

}  // namespace tpde
