#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>

#include "tpde/circuit.hpp"

namespace tpde {

/// Phase gate angles theta_k = k pi / 2, k = 0..3.
inline constexpr std::array<double, 4> kPhaseAngles{0.0, 1.5707963267948966, 3.141592653589793,
                                                     4.71238898038469};

struct ExperimentCircuit {
  BrickWallCircuit prep;  ///< N+1 wires, ancilla on wire 0
  BrickWallCircuit evol;  ///< N wires, applied to wires 1..N
  Index theta = 0;        ///< index into kPhaseAngles
  Index steps = 0;
  void validate() const;
};

struct NoiseSpec {
  double p_step = 0.0;
  /// 0 selects exact probabilities.
  Index shots = 0;
  std::uint64_t seed = 1;

  bool exact() const { return shots == 0; }
  /// 1 - (1 - p_step)^steps
  double p_dep(Index steps) const;
  void validate() const;
};

enum class SimBackend { automatic, dense, mps };

/// (1 - p_dep) m + p_dep / 2^wires
double depolarize(double m, double p_dep, Index wires);

/// Outcome of one (step, theta) measurement.
struct Observation {
  double m = 0.0;   ///< estimate of m'(theta)
  Index count = 0;  ///< all-zeros count (0 in exact mode)
};

/// Noise and shot sampling on top of a noiseless probability. The shot RNG is
/// seeded from (seed, step, theta) so results do not depend on call order.
Observation observe(double m, Index steps, Index theta, Index wires, const NoiseSpec& noise);

/// Incremental simulation of U_prep^dag P(theta) U_evol^n U_prep |0...0>.
/// The state U_evol^n U_prep |0> is advanced one step at a time and all four
/// phases are read from the two ancilla-branch amplitudes.
class StepSimulator {
 public:
  StepSimulator(const BrickWallCircuit& prep, const BrickWallCircuit& evol,
                SimBackend backend = SimBackend::automatic, Index max_bond = kUnboundedBond,
                double cutoff = 1e-12);
  /// Dense variant: `psi0` on N+1 qubits and an explicit 2^N x 2^N step
  /// operator acting on wires 1..N.
  StepSimulator(const CVector& psi0, const CMatrix& step_operator);
  ~StepSimulator();
  StepSimulator(StepSimulator&&) noexcept;
  StepSimulator& operator=(StepSimulator&&) noexcept;

  Index steps() const;
  void advance();
  /// A_b = <psi_prep| (|b><b| (x) I) U_evol^n |psi_prep>
  std::array<cplx, 2> branch_amplitudes() const;
  /// Noiseless m(theta_k) for the current step.
  std::array<double, 4> probabilities() const;
  /// ||(<0| (x) I) U_prep |0...0>||^2
  double a0sq() const;
  Index wires() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single-shot evaluation of one circuit of the family.
double measure_m(const ExperimentCircuit& circ, const NoiseSpec& noise,
                 SimBackend backend = SimBackend::automatic);

/// ||(<0| (x) I) U_prep |0...0>||^2, evaluated by projecting the ancilla site
/// of the prepared MPS.
double ancilla_zero_weight(const BrickWallCircuit& prep);

/// One JSON line {"t", "theta", "shots", "count", "m"}.
void write_run_log_line(std::ostream& os, double t, double theta, Index shots, Index count, double m);

}  // namespace tpde
