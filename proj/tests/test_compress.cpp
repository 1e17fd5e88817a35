#include <random>
#include <set>

#include "doctest.h"
#include "support/oracle.hpp"
#include "tpde/compress.hpp"
#include "tpde/errors.hpp"
#include "tpde/hubbard.hpp"
#include "tpde/trotter.hpp"

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

cplx oracle_trace(const oracle::Mat& d, const BrickWallCircuit& c) {
  return oracle::matmul(d, oracle_unitary(c)).trace();
}

cplx oracle_overlap(const oracle::Vec& t, const BrickWallCircuit& c) {
  oracle::Vec zero = oracle::Vec::Zero(t.size());
  zero(0) = 1.0;
  return t.dot(oracle_unitary(c) * zero);
}

Gate as_gate(const Tensor& t) { return Gate(ConstRowMap(t.raw(), 4, 4)); }

}  // namespace

TEST_CASE("brick-wall initialization") {
  const BrickWallCircuit id = init_brickwall(5, 3, 0.0, 7);
  for (const auto& layer : id.layers)
    for (const auto& g : layer.gates) CHECK((g - Gate::Identity()).norm() == 0.0);

  const BrickWallCircuit a = init_brickwall(5, 3, 0.01, 7, 1);
  const BrickWallCircuit b = init_brickwall(5, 3, 0.01, 7, 1);
  const BrickWallCircuit other = init_brickwall(5, 3, 0.01, 8, 1);
  a.validate();
  CHECK(a.layers[0].offset == 1);
  double diff = 0.0;
  for (Index l = 0; l < a.depth(); ++l)
    for (Index j = 0; j < a.layers[l].gates.size(); ++j) {
      const Gate& g = a.layers[l].gates[j];
      CHECK((g.adjoint() * g - Gate::Identity()).norm() < 1e-13);
      CHECK((g - Gate::Identity()).norm() < 0.1);
      CHECK((g - b.layers[l].gates[j]).norm() == 0.0);
      diff += (g - other.layers[l].gates[j]).norm();
    }
  CHECK(diff > 0.0);
  CHECK_THROWS_AS(init_brickwall(4, 2, -1.0, 1), ValidationError);
}

TEST_CASE("zigzag order visits every gate once") {
  const BrickWallCircuit c = identity_circuit(4, 3);
  const std::vector<std::pair<Index, Index>> expected{{0, 0}, {2, 0}, {1, 0}, {0, 1}, {2, 1}};
  CHECK(zigzag_order(c) == expected);

  const BrickWallCircuit wide = identity_circuit(7, 5, 1);
  const auto order = zigzag_order(wide);
  CHECK(order.size() == wide.gate_count());
  std::set<std::pair<Index, Index>> seen(order.begin(), order.end());
  CHECK(seen.size() == order.size());
}

TEST_CASE("evolution environment is the linear response of the trace") {
  std::mt19937_64 rng(301);
  const oracle::Mat d = oracle::random_unitary(rng, 32);
  const Mpo ref = mpo_from_dense(d);
  const BrickWallCircuit c = random_circuit(rng, 5, 4, 1);
  CHECK(std::abs(evolution_trace(ref, c) - oracle_trace(d, c)) < 1e-10);
  for (Index l = 0; l < c.depth(); ++l)
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      const Gate env = as_gate(environment_gate(ref, c, l, j));
      BrickWallCircuit probe = c;
      probe.layers[l].gates[j] = oracle::random_matrix(rng, 4, 4);
      const cplx expected = oracle_trace(d, probe);
      CHECK(std::abs((env.adjoint() * probe.layers[l].gates[j]).trace() - expected) < 1e-10);
    }
}

TEST_CASE("preparation environment is the linear response of the overlap") {
  std::mt19937_64 rng(302);
  const oracle::Vec t = oracle::random_state(rng, 32);
  const Mps target = statevector_to_mps(t);
  const BrickWallCircuit c = random_circuit(rng, 5, 3);
  CHECK(std::abs(prep_overlap(target, c) - oracle_overlap(t, c)) < 1e-12);
  for (Index l = 0; l < c.depth(); ++l)
    for (Index j = 0; j < c.layers[l].gates.size(); ++j) {
      const Gate env = as_gate(environment_gate(target, c, l, j));
      BrickWallCircuit probe = c;
      probe.layers[l].gates[j] = oracle::random_matrix(rng, 4, 4);
      const cplx expected = oracle_overlap(t, probe);
      CHECK(std::abs((env.adjoint() * probe.layers[l].gates[j]).trace() - expected) < 1e-12);
    }
}

TEST_CASE("evolution objective never increases") {
  std::mt19937_64 rng(303);
  const oracle::Mat d = oracle::random_unitary(rng, 32);
  CompressOptions opt;
  opt.sweeps = 6;
  opt.perturbation = 0.5;
  opt.seed = 4;
  opt.record_updates = true;
  opt.checkpoints = {0, 2, 6};
  const CompressResult r = optimize_evolution(CMatrix(d), 4, opt);
  REQUIRE(r.update_objectives.size() == 6 * r.circuit.gate_count());
  double prev = r.reports[0].objective;
  for (double v : r.update_objectives) {
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
  REQUIRE(r.reports.size() == 7);
  const cplx tr = oracle_trace(d, r.circuit);
  CHECK(r.reports.back().objective == doctest::Approx(64.0 - 2.0 * tr.real()).epsilon(1e-10));
  CHECK(r.reports.back().overlap_or_fidelity == doctest::Approx(std::abs(tr) / 32.0).epsilon(1e-10));

  REQUIRE(r.checkpoints.size() == 3);
  CHECK(r.checkpoints[0].first == 0);
  CHECK(r.checkpoints[2].first == 6);
  for (const auto& [sweep, circuit] : r.checkpoints) {
    const double f = oracle_trace(d, circuit).real();
    CHECK(r.reports[sweep].objective == doctest::Approx(64.0 - 2.0 * f).epsilon(1e-10));
  }
}

TEST_CASE("identity reference is fitted exactly from the identity start") {
  CompressOptions opt;
  opt.sweeps = 2;
  opt.perturbation = 0.0;
  const CompressResult r = optimize_evolution(CMatrix(CMatrix::Identity(16, 16)), 3, opt);
  for (const auto& rep : r.reports) {
    CHECK(std::abs(rep.objective) < 1e-12);
    CHECK(rep.overlap_or_fidelity == doctest::Approx(1.0));
  }
}

TEST_CASE("small Hubbard step compresses to high fidelity") {
  const Hamiltonian h = build_hubbard({2, 1.0, 10.0});
  const Mpo ref = build_exact_reference_mpo(h, 0.05, TimeSign::reverse);
  CompressOptions opt;
  opt.sweeps = 1000;
  const CompressResult r = optimize_evolution(ref, 5, opt);
  CHECK(r.reports.back().overlap_or_fidelity >= 0.999);
  const oracle::Mat forward = oracle::expm(cplx(0.0, -0.05) * dense_hamiltonian(h));
  const double fid = std::abs(oracle::matmul(forward.adjoint(), oracle_unitary(r.circuit)).trace()) / 16.0;
  CHECK(fid == doctest::Approx(r.reports.back().overlap_or_fidelity).epsilon(1e-6));
}

TEST_CASE("preparation of the zero state and of a shallow circuit state") {
  CompressOptions opt;
  opt.sweeps = 3;
  opt.perturbation = 0.0;
  const CompressResult zero = optimize_prep(zero_state(5), 2, opt);
  CHECK(zero.reports.back().overlap_or_fidelity == doctest::Approx(1.0));

  std::mt19937_64 rng(304);
  const BrickWallCircuit shallow = random_circuit(rng, 5, 2);
  CVector t = CVector::Zero(32);
  t(0) = 1.0;
  apply_circuit(shallow, t);
  opt.sweeps = 300;
  opt.perturbation = 0.01;
  opt.record_updates = true;
  const CompressResult r = optimize_prep(t, 4, opt);
  double prev = r.reports[0].objective;
  for (double v : r.update_objectives) {
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK(r.reports.back().overlap_or_fidelity > 0.99);
  CHECK(std::abs(prep_overlap(statevector_to_mps(t), r.circuit)) ==
        doctest::Approx(r.reports.back().overlap_or_fidelity).epsilon(1e-10));
}

TEST_CASE("iterative enhancement telescopes to the full circuit overlap") {
  std::mt19937_64 rng(305);
  const oracle::Vec t = oracle::random_state(rng, 64);
  const Mps target = statevector_to_mps(t);
  CompressOptions opt;
  opt.sweeps = 30;
  const EnhanceResult e = enhance_overlap(target, 2, opt, 4, 0.0, kUnboundedBond, 0.0);
  REQUIRE(e.overlaps.size() == 4);
  CHECK(e.circuit.depth() == 8);
  e.circuit.validate();
  for (Index k = 1; k < e.overlaps.size(); ++k) CHECK(e.overlaps[k] >= e.overlaps[k - 1] - 1e-12);
  CHECK(std::abs(oracle_overlap(t, e.circuit)) == doctest::Approx(e.overlaps.back()).epsilon(1e-10));
  CHECK(std::abs(e.overlaps[0] - e.iterations[0].reports.back().overlap_or_fidelity) < 1e-10);

  const EnhanceResult capped = enhance_overlap(target, 2, opt, 4, 0.0, 1, 0.0);
  CHECK(capped.stop_reason == "bond_budget");
}

TEST_CASE("evolution objective is the Frobenius distance") {
  std::mt19937_64 rng(306);
  for (int rep = 0; rep < 3; ++rep) {
    const oracle::Mat u_ref = oracle::random_unitary(rng, 64);
    const BrickWallCircuit c = random_circuit(rng, 6, 3);
    const oracle::Mat u = oracle_unitary(c);
    const double dist2 = (u_ref - u).squaredNorm();
    CHECK(dist2 + 2.0 * oracle::matmul(u_ref.adjoint(), u).trace().real() == doctest::Approx(128.0).epsilon(1e-12));
  }
  const oracle::Mat u_ref = oracle::random_unitary(rng, 16);
  CompressOptions opt;
  opt.sweeps = 3;
  const CompressResult r = optimize_evolution(CMatrix(u_ref.adjoint()), 2, opt);
  CHECK(r.reports.back().objective == doctest::Approx((u_ref - oracle_unitary(r.circuit)).squaredNorm()).epsilon(1e-10));
}
