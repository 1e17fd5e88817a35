#include "tpde/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "json.hpp"
#include "tpde/errors.hpp"

namespace tpde {

void ExperimentCircuit::validate() const {
  if (theta >= kPhaseAngles.size()) throw ValidationError("theta index must be 0..3");
  if (prep.width != evol.width + 1) {
    throw ValidationError("preparation circuit must have one more wire than the evolution circuit");
  }
  prep.validate();
  evol.validate();
}

double NoiseSpec::p_dep(Index steps) const {
  return 1.0 - std::pow(1.0 - p_step, static_cast<double>(steps));
}

void NoiseSpec::validate() const {
  if (!(p_step >= 0.0 && p_step < 1.0)) throw ValidationError("p_step must lie in [0, 1)");
}

double depolarize(double m, double p_dep, Index wires) {
  return (1.0 - p_dep) * m + p_dep / std::ldexp(1.0, static_cast<int>(wires));
}

Observation observe(double m, Index steps, Index theta, Index wires, const NoiseSpec& noise) {
  const double noisy = depolarize(m, noise.p_dep(steps), wires);
  if (noise.exact()) return {noisy, 0};
  std::seed_seq seq{static_cast<std::uint32_t>(noise.seed), static_cast<std::uint32_t>(noise.seed >> 32),
                    static_cast<std::uint32_t>(steps), static_cast<std::uint32_t>(theta)};
  std::mt19937_64 rng(seq);
  std::binomial_distribution<Index> binom(noise.shots, std::clamp(noisy, 0.0, 1.0));
  const Index k = binom(rng);
  return {static_cast<double>(k) / static_cast<double>(noise.shots), k};
}

struct StepSimulator::Impl {
  BrickWallCircuit evol;
  Index wires = 0;
  Index steps = 0;
  bool dense = true;
  Index max_bond = kUnboundedBond;
  double cutoff = 0.0;
  CVector psi0, psi;
  Mps mps0, mps;
  CMatrix step_operator;  ///< used instead of `evol` when non-empty
};

StepSimulator::StepSimulator(const BrickWallCircuit& prep, const BrickWallCircuit& evol,
                             SimBackend backend, Index max_bond, double cutoff)
    : impl_(std::make_unique<Impl>()) {
  if (prep.width != evol.width + 1) {
    throw ValidationError("preparation circuit must have one more wire than the evolution circuit");
  }
  Impl& s = *impl_;
  s.evol = evol;
  s.wires = prep.width;
  s.max_bond = max_bond;
  s.cutoff = cutoff;
  s.dense = backend == SimBackend::dense || (backend == SimBackend::automatic && s.wires <= 16);
  if (s.dense) {
    if (s.wires > 26) throw ResourceError("dense simulation is limited to 26 qubits");
    s.psi0 = CVector::Zero(Eigen::Index{1} << s.wires);
    s.psi0(0) = 1.0;
    apply_circuit(prep, s.psi0);
    s.psi = s.psi0;
  } else {
    s.mps0 = circuit_to_mps(prep, zero_state(s.wires), max_bond, cutoff);
    s.mps = s.mps0;
  }
}

StepSimulator::StepSimulator(const CVector& psi0, const CMatrix& step_operator)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  if (step_operator.rows() != step_operator.cols() || 2 * step_operator.rows() != psi0.size()) {
    throw ShapeError("step operator must act on all but the first qubit of the state");
  }
  s.wires = dense::qubit_count(static_cast<Index>(psi0.size()));
  s.psi0 = psi0;
  s.psi = psi0;
  s.step_operator = step_operator;
}

StepSimulator::~StepSimulator() = default;
StepSimulator::StepSimulator(StepSimulator&&) noexcept = default;
StepSimulator& StepSimulator::operator=(StepSimulator&&) noexcept = default;

Index StepSimulator::steps() const { return impl_->steps; }
Index StepSimulator::wires() const { return impl_->wires; }

void StepSimulator::advance() {
  Impl& s = *impl_;
  if (s.step_operator.size() > 0) {
    const Eigen::Index half = s.psi.size() / 2;
    Eigen::Map<CMatrix> branches(s.psi.data(), half, 2);
    branches = (s.step_operator * branches).eval();
  } else if (s.dense) {
    apply_circuit(s.evol, s.psi, 1);
  } else {
    for (Index l = 0; l < s.evol.depth(); ++l) {
      for (Index j = 0; j < s.evol.layers[l].gates.size(); ++j) {
        apply_two_site(s.mps, s.evol.layers[l].gates[j], s.evol.pair_start(l, j) + 1, s.max_bond,
                       s.cutoff);
      }
    }
  }
  ++s.steps;
}

std::array<cplx, 2> StepSimulator::branch_amplitudes() const {
  const Impl& s = *impl_;
  if (s.dense) {
    const Eigen::Index half = s.psi.size() / 2;
    return {s.psi0.head(half).dot(s.psi.head(half)), s.psi0.tail(half).dot(s.psi.tail(half))};
  }
  return {inner(project_site(s.mps0, 0, 0), project_site(s.mps, 0, 0)),
          inner(project_site(s.mps0, 0, 1), project_site(s.mps, 0, 1))};
}

std::array<double, 4> StepSimulator::probabilities() const {
  const auto [a0, a1] = branch_amplitudes();
  std::array<double, 4> m{};
  for (Index k = 0; k < 4; ++k) {
    m[k] = std::norm(a0 + std::polar(1.0, kPhaseAngles[k]) * a1);
  }
  return m;
}

double StepSimulator::a0sq() const {
  const Impl& s = *impl_;
  if (s.dense) return s.psi0.head(s.psi0.size() / 2).squaredNorm();
  return std::pow(norm(project_site(s.mps0, 0, 0)), 2);
}

double measure_m(const ExperimentCircuit& circ, const NoiseSpec& noise, SimBackend backend) {
  circ.validate();
  noise.validate();
  StepSimulator sim(circ.prep, circ.evol, backend);
  for (Index n = 0; n < circ.steps; ++n) sim.advance();
  const double m = sim.probabilities()[circ.theta];
  return observe(m, circ.steps, circ.theta, sim.wires(), noise).m;
}

double ancilla_zero_weight(const BrickWallCircuit& prep) {
  const Mps s = circuit_to_mps(prep, zero_state(prep.width), kUnboundedBond, 0.0);
  return std::pow(norm(project_site(s, 0, 0)), 2);
}

void write_run_log_line(std::ostream& os, double t, double theta, Index shots, Index count, double m) {
  nlohmann::json j{{"t", t}, {"theta", theta}, {"shots", shots}, {"count", count}, {"m", m}};
  os << j.dump() << '\n';
}

}  // namespace tpde
