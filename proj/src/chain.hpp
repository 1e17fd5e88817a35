#pragma once

// Shared machinery for MPS and MPO: both are handled as chains of rank-3
// site tensors (left bond, d, right bond), with d = 2 or d = 4.

#include <functional>
#include <optional>
#include <vector>

#include "tpde/tensor.hpp"

namespace tpde::chain {

using Sites = std::vector<Tensor>;

/// Bond extents between consecutive sites.
std::vector<Index> bonds(const Sites& s);
void validate(const Sites& s, Index rank, const char* what);

/// QR on site k, R absorbed into k+1.
void shift_right(Sites& s, Index k);
/// LQ on site k, L absorbed into k-1.
void shift_left(Sites& s, Index k);
void move_center(Sites& s, std::optional<Index>& center, Index target);

/// Requires the centre at the last site; leaves it at site 0. Returns the
/// summed discarded weight (a bound on the 2-norm error).
double truncate_sweep(Sites& s, Index max_bond, double cutoff);
double compress(Sites& s, std::optional<Index>& center, Index max_bond, double cutoff);

/// Builds site k lazily, QR-sweeps as it goes and finishes with a truncating
/// sweep; the centre ends at site 0.
Sites zip_build(Index n, const std::function<Tensor(Index)>& site, Index max_bond, double cutoff,
                double& error);

/// theta = s[p] s[p+1] with legs (l, d, d, r) is replaced by f(theta) and split
/// again. The centre ends on p+1 if `center_right`, else on p.
double update_pair(Sites& s, std::optional<Index>& center, Index p,
                   const std::function<Tensor(const Tensor&)>& f, Index max_bond, double cutoff,
                   bool center_right);

/// TT decomposition of a flat vector with n legs of dimension d.
Sites tt_svd(const cplx* data, Index n, Index d, Index max_bond, double cutoff, double& error);
/// Dense contraction of the chain, legs in site order.
std::vector<cplx> to_vector(const Sites& s);
/// sum conj(a) b over all legs.
cplx overlap(const Sites& a, const Sites& b);

}  // namespace tpde::chain
