#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support/oracle.hpp"
#include "tpde/errors.hpp"
#include "tpde/sim.hpp"

using namespace tpde;

namespace {

BrickWallCircuit random_circuit(std::mt19937_64& rng, Index width, Index depth, Index first = 0) {
  BrickWallCircuit c = identity_circuit(width, depth, first);
  for (auto& layer : c.layers)
    for (auto& g : layer.gates) g = oracle::random_unitary(rng, 4);
  return c;
}

oracle::Mat oracle_unitary(const BrickWallCircuit& c) {
  const int n = static_cast<int>(c.width);
  oracle::Mat u = oracle::eye(Eigen::Index{1} << n);
  for (Index l = 0; l < c.depth(); ++l)
    for (Index j = 0; j < c.layers[l].gates.size(); ++j)
      u = oracle::matmul(oracle::embed(c.layers[l].gates[j], static_cast<int>(c.pair_start(l, j)), n), u);
  return u;
}

// Full final state U_prep^dag U_evol^n P(theta) U_prep |0...0> by dense products.
oracle::Vec oracle_final_state(const ExperimentCircuit& e) {
  const Eigen::Index dim = Eigen::Index{1} << e.prep.width;
  const oracle::Mat up = oracle_unitary(e.prep);
  const oracle::Mat ue = oracle::kron(oracle::eye(2), oracle_unitary(e.evol));
  oracle::Mat phase = oracle::eye(2);
  phase(1, 1) = std::polar(1.0, kPhaseAngles[e.theta]);
  const oracle::Mat p = oracle::kron(phase, oracle::eye(dim / 2));
  oracle::Vec v = oracle::Vec::Zero(dim);
  v(0) = 1.0;
  v = p * (up * v);
  for (Index n = 0; n < e.steps; ++n) v = ue * v;
  return up.adjoint() * v;
}

}  // namespace

TEST_CASE("no evolution returns the all-zeros state") {
  std::mt19937_64 rng(401);
  ExperimentCircuit e{random_circuit(rng, 5, 3), random_circuit(rng, 4, 2, 1), 0, 0};
  CHECK(measure_m(e, {}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(depolarize(0.3, 1.0, 5) == doctest::Approx(1.0 / 32.0));
}

TEST_CASE("dense and MPS backends match the dense oracle") {
  std::mt19937_64 rng(402);
  ExperimentCircuit e{random_circuit(rng, 6, 3), random_circuit(rng, 5, 3, 1), 0, 0};
  for (Index steps : {1, 3}) {
    for (Index theta = 0; theta < 4; ++theta) {
      e.steps = steps;
      e.theta = theta;
      const oracle::Vec v = oracle_final_state(e);
      CHECK(v.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
      const double expected = std::norm(v(0));
      CHECK(std::abs(measure_m(e, {}, SimBackend::dense) - expected) < 1e-12);
      CHECK(std::abs(measure_m(e, {}, SimBackend::mps) - expected) < 1e-12);
    }
  }
}

TEST_CASE("phase pairs share the same total") {
  std::mt19937_64 rng(403);
  StepSimulator sim(random_circuit(rng, 5, 4), random_circuit(rng, 4, 3));
  for (int n = 0; n < 4; ++n) {
    sim.advance();
    const auto m = sim.probabilities();
    CHECK(std::abs(m[0] + m[2] - m[1] - m[3]) < 1e-12);
    for (double v : m) CHECK((v >= 0.0 && v <= 1.0 + 1e-12));
  }
}

TEST_CASE("ancilla zero weight") {
  CHECK(ancilla_zero_weight(identity_circuit(5, 2)) == doctest::Approx(1.0));

  BrickWallCircuit h = identity_circuit(5, 1);
  oracle::Mat had(2, 2);
  had << 1.0, 1.0, 1.0, -1.0;
  had /= std::sqrt(2.0);
  h.layers[0].gates[0] = oracle::kron(had, oracle::eye(2));
  CHECK(ancilla_zero_weight(h) == doctest::Approx(0.5));

  std::mt19937_64 rng(404);
  const BrickWallCircuit prep = random_circuit(rng, 7, 4);
  oracle::Vec v = oracle::Vec::Zero(128);
  v(0) = 1.0;
  v = oracle_unitary(prep) * v;
  CHECK(std::abs(ancilla_zero_weight(prep) - v.head(64).squaredNorm()) < 1e-12);
  StepSimulator dense(prep, identity_circuit(6, 1), SimBackend::dense);
  StepSimulator mps(prep, identity_circuit(6, 1), SimBackend::mps);
  CHECK(std::abs(dense.a0sq() - v.head(64).squaredNorm()) < 1e-12);
  CHECK(std::abs(mps.a0sq() - v.head(64).squaredNorm()) < 1e-12);
}

TEST_CASE("depolarizing noise is affine in p_dep") {
  std::mt19937_64 rng(405);
  ExperimentCircuit e{random_circuit(rng, 5, 3), random_circuit(rng, 4, 2), 1, 4};
  const double m = measure_m(e, {});
  const double floor = 1.0 / 32.0;
  for (double p_step : {0.0, 0.02, 0.1}) {
    NoiseSpec noise;
    noise.p_step = p_step;
    const double p = noise.p_dep(4);
    CHECK(p == doctest::Approx(1.0 - std::pow(1.0 - p_step, 4)));
    CHECK(std::abs(measure_m(e, noise) - (m + p * (floor - m))) < 1e-12);
  }
  NoiseSpec bad;
  bad.p_step = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("shot sampling is unbiased and reproducible") {
  std::mt19937_64 rng(406);
  ExperimentCircuit e{random_circuit(rng, 4, 3), random_circuit(rng, 3, 2), 2, 2};
  NoiseSpec noise;
  noise.p_step = 0.05;
  noise.shots = 1000;
  const double exact = depolarize(measure_m(e, {}), noise.p_dep(2), 4);
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    noise.seed = seed;
    sum += measure_m(e, noise);
  }
  const double se = std::sqrt(exact * (1.0 - exact) / (1000.0 * 100.0));
  CHECK(std::abs(sum / 100.0 - exact) < 5.0 * se);
  noise.seed = 9;
  CHECK(measure_m(e, noise) == measure_m(e, noise));
  const Observation o = observe(0.4, 3, 1, 4, noise);
  CHECK(o.m == doctest::Approx(static_cast<double>(o.count) / 1000.0));
}

TEST_CASE("run log lines are JSON records") {
  std::ostringstream os;
  write_run_log_line(os, 0.15, kPhaseAngles[1], 100000, 4321, 0.04321);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j["t"].get<double>() == doctest::Approx(0.15));
  CHECK(j["shots"].get<Index>() == 100000);
  CHECK(j["count"].get<Index>() == 4321);
}

TEST_CASE("experiment circuit validation") {
  ExperimentCircuit e{identity_circuit(4, 1), identity_circuit(4, 1), 0, 0};
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e.evol = identity_circuit(3, 1);
  e.theta = 4;
  CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("explicit step operator matches the circuit backend") {
  std::mt19937_64 rng(407);
  const BrickWallCircuit prep = random_circuit(rng, 5, 3);
  const BrickWallCircuit evol = random_circuit(rng, 4, 2, 1);
  CVector psi0 = CVector::Zero(32);
  psi0(0) = 1.0;
  apply_circuit(prep, psi0);
  StepSimulator a(prep, evol);
  StepSimulator b(psi0, to_dense(evol));
  CHECK(b.a0sq() == doctest::Approx(a.a0sq()));
  for (int n = 0; n < 3; ++n) {
    a.advance();
    b.advance();
    const auto pa = a.probabilities(), pb = b.probabilities();
    for (int k = 0; k < 4; ++k) CHECK(std::abs(pa[k] - pb[k]) < 1e-12);
  }
  CHECK_THROWS_AS(StepSimulator(psi0, CMatrix::Identity(8, 8)), ShapeError);
}
