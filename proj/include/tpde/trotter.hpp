#pragma once

#include "tpde/hubbard.hpp"
#include "tpde/mpo.hpp"

namespace tpde {

/// reverse: e^{+iH dt} (the adjoint reference U_ref^dagger); forward: e^{-iH dt}.
enum class TimeSign { forward, reverse };

enum class TrotterBackend {
  automatic,  ///< dense assembly up to 10 qubits, MPO assembly above
  dense,      ///< exact dense product, then one TT-SVD to an MPO
  mpo,        ///< each exponential applied as a bond-2 MPO with compression
};

struct TrotterSpec {
  double dt = 0.05;
  Index slices = 100;
  TimeSign sign = TimeSign::reverse;
  double cutoff = 1e-12;
  Index max_bond = kUnboundedBond;
  TrotterBackend backend = TrotterBackend::automatic;
};

/// One reverse slice is
///   prod_{b=1..K} e^{i C_b P_b dt/(2m)}  prod_{b=K..1} e^{i C_b P_b dt/(2m)}
/// in the Hamiltonian's term order (leftmost factor acts last); the full
/// operator is the slice to the power m. Forward sign gives the adjoint.
Mpo build_trotter_mpo(const Hamiltonian& h, const TrotterSpec& spec);

/// Dense matrix of the same product formula.
CMatrix trotter_dense(const Hamiltonian& h, double dt, Index slices, TimeSign sign);

/// Trotter MPO with 100 slices, used as the exact propagator.
Mpo build_exact_reference_mpo(const Hamiltonian& h, double dt, TimeSign sign,
                              double cutoff = 1e-12, Index max_bond = kUnboundedBond);

inline constexpr Index kReferenceSlices = 100;

}  // namespace tpde
