#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpde/circuit.hpp"
#include "tpde/mpo.hpp"
#include "tpde/mps.hpp"

namespace tpde {

/// State of the objective after a sweep (sweep 0 is the initial circuit).
struct SweepReport {
  Index sweep = 0;
  /// ||U_ref - U_evol||_F^2 = 2^(N+1) - 2 Re Tr[U_ref^dagger U_evol]  or
  /// 1 - Re <target|U_prep|0...0>.
  double objective = 0.0;
  /// |Tr[U_ref^dagger U_evol]| / 2^N  or  |<target|U_prep|0...0>|.
  double overlap_or_fidelity = 0.0;
};

struct CompressOptions {
  Index sweeps = 1000;
  double perturbation = 0.01;
  std::uint64_t seed = 1;
  /// Offset of the first brick-wall layer.
  Index first_offset = 0;
  /// Sweep counts after which a copy of the circuit is kept.
  std::vector<Index> checkpoints;
  /// Record the objective after every single-gate update.
  bool record_updates = false;
};

struct CompressResult {
  BrickWallCircuit circuit;
  std::vector<SweepReport> reports;
  std::vector<double> update_objectives;
  std::vector<std::pair<Index, BrickWallCircuit>> checkpoints;
};

/// Every gate is the unitary polar factor of I + eps R with R a complex
/// Gaussian matrix of unit variance per entry (seeded mt19937_64).
BrickWallCircuit init_brickwall(Index width, Index depth, double eps, std::uint64_t seed,
                                Index first_offset = 0);

/// Update order of one sweep. Column c holds the gates on (c, c+1); columns run
/// left to right, even columns from the first layer up, odd columns from the
/// last layer down. Entries are (layer, gate index).
std::vector<std::pair<Index, Index>> zigzag_order(const BrickWallCircuit& c);

/// Four-leg environment G' of gate (layer, j): Re Tr[G'^dagger G] equals
/// Re Tr[U_ref^dagger U_evol] with every other gate held fixed.
Tensor environment_gate(const Mpo& reference_adjoint, const BrickWallCircuit& c, Index layer,
                        Index j);
/// Same for the preparation objective Re <target|U_prep|0...0>.
Tensor environment_gate(const Mps& target, const BrickWallCircuit& c, Index layer, Index j);

/// Tr[U_ref^dagger U_evol] with the reference given as an MPO of U_ref^dagger.
cplx evolution_trace(const Mpo& reference_adjoint, const BrickWallCircuit& c);
/// <target|U_prep|0...0> evaluated through circuit_to_mps.
cplx prep_overlap(const Mps& target, const BrickWallCircuit& c);

/// Largest register accepted by the dense evolution engine.
inline constexpr Index kMaxDenseEvolutionQubits = 12;

/// Fits a width-N brick wall to the reference (given as U_ref^dagger). The
/// objective is evaluated exactly on the dense 2^N x 2^N operator.
CompressResult optimize_evolution(const Mpo& reference_adjoint, Index depth,
                                  const CompressOptions& opt);
CompressResult optimize_evolution(const CMatrix& reference_adjoint, Index depth,
                                  const CompressOptions& opt);

/// Maximizes Re <target|U_prep|0...0> on dense vectors.
CompressResult optimize_prep(const Mps& target, Index depth, const CompressOptions& opt);
CompressResult optimize_prep(const CVector& target, Index depth, const CompressOptions& opt);

struct EnhanceResult {
  BrickWallCircuit circuit;      ///< U^(1) ... U^(k_max); U^(k_max) acts first
  std::vector<double> overlaps;  ///< |<target|U|0...0>| after each iteration
  std::vector<CompressResult> iterations;
  Mps residual;                  ///< U^(k_max)^dagger ... U^(1)^dagger |target>
  std::string stop_reason;
};

/// Repeatedly optimizes a fresh block against the residual target
/// |MPS^(k+1)> = U^(k)^dagger |MPS^(k)>. Stops after max_iters, when the gain
/// drops below gain_tol, or when the residual needs a bond above max_bond.
EnhanceResult enhance_overlap(const Mps& target, Index depth_per_iter, const CompressOptions& opt,
                              Index max_iters, double cutoff, Index max_bond = kUnboundedBond,
                              double gain_tol = 1e-3);

}  // namespace tpde
