#include <algorithm>
#include <random>

#include "doctest.h"
#include "support/oracle.hpp"
#include "tpde/errors.hpp"
#include "tpde/hubbard.hpp"

using namespace tpde;

namespace {

// Hubbard Hamiltonian assembled from fermionic ladder operators.
oracle::Mat fermionic_hubbard(int ns, double t, double u) {
  const int n = 2 * ns;
  const Eigen::Index dim = Eigen::Index{1} << n;
  oracle::Mat h = oracle::Mat::Zero(dim, dim);
  auto c = [&](int q, int s) { return oracle::annihilation(2 * q + s, n); };
  for (int q = 0; q + 1 < ns; ++q)
    for (int s = 0; s < 2; ++s) {
      const oracle::Mat hop = c(q, s).adjoint() * c(q + 1, s);
      h -= t * (hop + hop.adjoint());
    }
  for (int q = 0; q < ns; ++q) {
    const oracle::Mat nu = c(q, 0).adjoint() * c(q, 0);
    const oracle::Mat nd = c(q, 1).adjoint() * c(q, 1);
    h += u * nu * nd - u / 2 * (nu + nd);
  }
  return h;
}

}  // namespace

TEST_CASE("single site reduces to the atomic limit") {
  const double u = 3.0;
  const CMatrix h = dense_hamiltonian(build_hubbard({1, 1.0, u}));
  oracle::Mat expect = oracle::Mat::Zero(4, 4);
  expect(1, 1) = expect(2, 2) = -u / 2;
  CHECK((h - expect).norm() < 1e-14);
}

TEST_CASE("Jordan-Wigner form equals the fermionic construction") {
  for (auto [ns, t, u] : {std::tuple{2, 1.0, 10.0}, std::tuple{3, 0.7, 2.5}, std::tuple{4, 1.0, 10.0}}) {
    const CMatrix h = dense_hamiltonian(build_hubbard({static_cast<Index>(ns), t, u}));
    CHECK((h - fermionic_hubbard(ns, t, u)).norm() < 1e-12);
  }
}

TEST_CASE("free-fermion spectrum at U = 0") {
  const double t = 1.0;
  const auto sol = exact_eigs(build_hubbard({2, t, 0.0}), 16);
  // Single-particle levels -t, +t for each spin; many-body levels are subset sums.
  const double eps[4] = {-t, t, -t, t};
  std::vector<double> expect;
  for (int mask = 0; mask < 16; ++mask) {
    double e = 0;
    for (int k = 0; k < 4; ++k)
      if (mask & (1 << k)) e += eps[k];
    expect.push_back(e);
  }
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 16; ++i) CHECK(sol.energies[i] == doctest::Approx(expect[i]).epsilon(1e-10));
}

TEST_CASE("Hamiltonian is Hermitian and conserves N and S_z") {
  for (Index ns = 1; ns <= 5; ++ns) {
    const CMatrix h = dense_hamiltonian(build_hubbard({ns, 1.0, 10.0}));
    CHECK((h - h.adjoint()).norm() < 1e-12);
    if (ns > 4) continue;
    const auto number = particle_number_diagonal(2 * ns);
    const auto spin = spin_z2_diagonal(2 * ns);
    CMatrix nop = CMatrix::Zero(h.rows(), h.cols()), sop = nop;
    for (Index x = 0; x < number.size(); ++x) {
      nop(x, x) = number[x];
      sop(x, x) = spin[x];
    }
    CHECK((h * nop - nop * h).norm() < 1e-10);
    CHECK((h * sop - sop * h).norm() < 1e-10);
  }
}

TEST_CASE("reference gap of the four-site chain") {
  const auto sol = exact_eigs(build_hubbard({4, 1.0, 10.0}), 6);
  CHECK(std::abs(sol.gap - 0.254) <= 1e-3);
  CHECK(sol.energies[0] == doctest::Approx(-20.91149747).epsilon(1e-9));
}

TEST_CASE("exact_eigs: single Z") {
  Hamiltonian h{1, {{1.0, {{0, 'Z'}}}}};
  const auto sol = exact_eigs(h, 2);
  CHECK(sol.energies[0] == doctest::Approx(-1.0));
  CHECK(sol.energies[1] == doctest::Approx(1.0));
  CHECK(sol.gap == doctest::Approx(2.0));
}

TEST_CASE("exact_eigs: random Pauli sums against full diagonalization") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> pick(0, 3);
  std::normal_distribution<double> coef;
  const char names[4] = {'I', 'X', 'Y', 'Z'};
  for (int trial = 0; trial < 5; ++trial) {
    Hamiltonian h{4, {}};
    oracle::Mat dense = oracle::Mat::Zero(16, 16);
    for (int term = 0; term < 8; ++term) {
      PauliTerm p{coef(rng), {}};
      std::string ops;
      for (Index q = 0; q < 4; ++q) {
        const char c = names[pick(rng)];
        ops.push_back(c);
        if (c != 'I') p.ops[q] = c;
      }
      h.terms.push_back(p);
      dense += p.coefficient * oracle::pauli_string(ops);
    }
    Eigen::SelfAdjointEigenSolver<oracle::Mat> ref(dense);
    for (auto method : {EigenMethod::dense, EigenMethod::lanczos}) {
      const auto sol = exact_eigs(h, 4, method);
      for (int i = 0; i < 4; ++i) {
        CHECK(sol.energies[i] == doctest::Approx(ref.eigenvalues()(i)).epsilon(1e-10));
        const CVector v = sol.states.col(i);
        CHECK((apply_hamiltonian(h, v) - sol.energies[i] * v).norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("block Lanczos resolves the degenerate first excited level") {
  const auto h = build_hubbard({4, 1.0, 10.0});
  const auto dense = exact_eigs(h, 6, EigenMethod::dense);
  const auto krylov = exact_eigs(h, 6, EigenMethod::lanczos);
  for (int i = 0; i < 6; ++i) CHECK(krylov.energies[i] == doctest::Approx(dense.energies[i]).epsilon(1e-10));
  CHECK(krylov.gap == doctest::Approx(dense.gap).epsilon(1e-10));
}

TEST_CASE("exact_eigs refuses oversized registers") {
  Hamiltonian h{15, {{1.0, {{0, 'Z'}}}}};
  CHECK_THROWS_AS(exact_eigs(h, 1), ResourceError);
}

TEST_CASE("pauli_expm_two_site") {
  PauliTerm zz{1.3, {{2, 'Z'}, {3, 'Z'}}};
  CHECK((CMatrix(pauli_expm_two_site(zz, 0.0).matrix(1)) - oracle::eye(4)).norm() < 1e-15);

  PauliTerm z{1.0, {{0, 'Z'}}};
  const double th = 0.37;
  const CMatrix ez = pauli_expm_two_site(z, th).matrix(1);
  CHECK(std::abs(ez(0, 0) - std::exp(cplx(0, th))) < 1e-15);
  CHECK(std::abs(ez(1, 1) - std::exp(cplx(0, -th))) < 1e-15);

  // XX and YY commute, so exp(i a (XX + YY)) is the product of both factors.
  const double c = -0.45, a = 0.8;
  PauliTerm xx{c, {{4, 'X'}, {5, 'X'}}};
  PauliTerm yy{c, {{4, 'Y'}, {5, 'Y'}}};
  const CMatrix prod = CMatrix(pauli_expm_two_site(xx, a).matrix(1)) *
                       CMatrix(pauli_expm_two_site(yy, a).matrix(1));
  const oracle::Mat expect =
      oracle::expm(cplx(0, a * c) * (oracle::pauli_string("XX") + oracle::pauli_string("YY")));
  CHECK((prod - expect).norm() < 1e-12);
  CHECK((prod.adjoint() * prod - oracle::eye(4)).norm() < 1e-12);
}

TEST_CASE("dense Pauli exponential on matrices") {
  std::mt19937_64 rng(42);
  PauliTerm t{0.6, {{0, 'Y'}, {1, 'Z'}, {2, 'X'}}};
  CMatrix m = oracle::random_matrix(rng, 16, 16);
  const oracle::Mat expect = oracle::expm(cplx(0, 0.6 * 0.2) * oracle::pauli_string("YZXI")) * m;
  apply_pauli_exp_left(m, t, 0.2);
  CHECK((m - expect).norm() < 1e-12);
}

TEST_CASE("target selection for the four-site chain") {
  const auto h = build_hubbard({4, 1.0, 10.0});
  const auto t = select_targets(h);
  CHECK(t.excited_multiplicity == 3);
  CHECK(t.gap == doctest::Approx(0.2536084068).epsilon(1e-8));
  CHECK((apply_hamiltonian(h, t.ground) - t.e0 * t.ground).norm() < 1e-10);
  CHECK((apply_hamiltonian(h, t.excited) - t.e1 * t.excited).norm() < 1e-10);
  CHECK(std::abs(t.ground.dot(t.excited)) < 1e-10);
  // The chosen excited vector lives entirely in the ground state's sector.
  const auto number = particle_number_diagonal(8);
  const auto spin = spin_z2_diagonal(8);
  double outside = 0.0;
  for (Index x = 0; x < 256; ++x) {
    if (number[x] != 4 || spin[x] != 0) outside += std::norm(t.excited(x));
  }
  CHECK(outside < 1e-20);
}
