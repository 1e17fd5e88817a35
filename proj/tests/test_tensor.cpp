#include <random>

#include "doctest.h"
#include "support/oracle.hpp"
#include "tpde/errors.hpp"
#include "tpde/tensor.hpp"

using namespace tpde;

namespace {

Tensor random_tensor(std::mt19937_64& rng, Shape shape) {
  std::normal_distribution<double> n;
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = cplx(n(rng), n(rng));
  return t;
}

oracle::Mat as_mat(const Tensor& t) { return oracle::Mat(t.matrix(1)); }

}  // namespace

TEST_CASE("contract: identity acting on a basis vector") {
  Tensor id = Tensor::identity(2);
  Tensor v({2}, {1.0, 0.0});
  Tensor out = contract(id, v, {{1, 0}});
  CHECK(out.shape() == Shape{2});
  CHECK(std::abs(out[0] - 1.0) < 1e-15);
  CHECK(std::abs(out[1]) < 1e-15);
}

TEST_CASE("contract: matrix product against triple loop") {
  std::mt19937_64 rng(1);
  Tensor a = random_tensor(rng, {3, 4});
  Tensor b = random_tensor(rng, {4, 2});
  const Tensor c = contract(a, b, {{1, 0}});
  CHECK((as_mat(c) - oracle::matmul(as_mat(a), as_mat(b))).norm() < 1e-12);
}

TEST_CASE("contract: full self contraction of a normalized state") {
  std::mt19937_64 rng(2);
  Tensor psi = random_tensor(rng, {2, 3, 2});
  psi *= 1.0 / psi.norm();
  const Tensor s = contract(psi.conj(), psi, {{0, 0}, {1, 1}, {2, 2}});
  CHECK(s.rank() == 0);
  CHECK(std::abs(s[0] - 1.0) < 1e-12);
}

TEST_CASE("contract: extent mismatch throws") {
  Tensor a({2, 3});
  Tensor b({4, 2});
  CHECK_THROWS_AS(contract(a, b, {{1, 0}}), ShapeError);
}

TEST_CASE("contract is bilinear") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor a = random_tensor(rng, {2, 3, 4});
    Tensor b = random_tensor(rng, {4, 3, 5});
    const cplx alpha(std::normal_distribution<double>()(rng), 0.7);
    const Tensor lhs = contract(alpha * a, b, {{2, 0}, {1, 1}});
    const Tensor rhs = alpha * contract(a, b, {{2, 0}, {1, 1}});
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("permute and reshape follow row-major layout") {
  Tensor t({2, 3});
  for (Index i = 0; i < 6; ++i) t[i] = static_cast<double>(i);
  const Tensor p = t.permuted({1, 0});
  CHECK(p.shape() == Shape{3, 2});
  CHECK(p.at({2, 1}) == t.at({1, 2}));
  CHECK_THROWS_AS(t.reshaped({4}), ShapeError);
}

TEST_CASE("truncated_svd: rank one") {
  Tensor t({2, 2}, {1.0, 2.0, 2.0, 4.0});
  const auto r = truncated_svd(t, {0}, kUnboundedBond, 1e-12);
  CHECK(r.bond() == 1);
  CHECK(r.truncation_error < 1e-15);
}

TEST_CASE("truncated_svd: relative cutoff drops the small value") {
  Tensor t({2, 2}, {1.0, 0.0, 0.0, 1e-3});
  const auto r = truncated_svd(t, {0}, kUnboundedBond, 1e-2);
  CHECK(r.bond() == 1);
  CHECK(r.truncation_error == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("truncated_svd: lossless reconstruction and isometries") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor t = random_tensor(rng, {8, 8});
    const auto r = truncated_svd(t, {0}, kUnboundedBond, 0.0);
    oracle::Mat u = as_mat(r.u), v = as_mat(r.vdag);
    oracle::Mat s = oracle::Mat::Zero(r.bond(), r.bond());
    for (Index i = 0; i < r.bond(); ++i) s(i, i) = r.s[i];
    CHECK((u * s * v - as_mat(t)).norm() < 1e-12 * as_mat(t).norm());
    CHECK((u.adjoint() * u - oracle::eye(u.cols())).norm() < 1e-12);
    CHECK((v * v.adjoint() - oracle::eye(v.rows())).norm() < 1e-12);
    for (Index i = 1; i < r.bond(); ++i) CHECK(r.s[i] <= r.s[i - 1]);
  }
}

TEST_CASE("truncated_svd: multi-axis split keeps leg order") {
  std::mt19937_64 rng(5);
  const Tensor t = random_tensor(rng, {2, 3, 2, 3});
  const auto r = truncated_svd(t, {1, 3}, kUnboundedBond, 0.0);
  CHECK(r.u.shape() == Shape{3, 3, r.bond()});
  CHECK(r.vdag.shape() == Shape{r.bond(), 2, 2});
  Tensor us = r.u;
  for (Index i = 0; i < us.size(); ++i) us[i] *= r.s[i % r.bond()];
  const Tensor back = contract(us, r.vdag, {{2, 0}}).permuted({2, 0, 3, 1});
  CHECK((back - t).norm() < 1e-12 * t.norm());
}

TEST_CASE("truncated_svd: zero tensor is degenerate") {
  CHECK_THROWS_AS(truncated_svd(Tensor({3, 3}), {0}, 4, 0.0), DegenerateError);
}

TEST_CASE("polar_unitary: fixed points and scaling") {
  std::mt19937_64 rng(6);
  const oracle::Mat u = oracle::random_unitary(rng, 4);
  const Tensor w = polar_unitary(Tensor::from_matrix(u));
  CHECK((as_mat(w) - u).norm() < 1e-12);
  Tensor two = Tensor::identity(4);
  two *= 2.0;
  CHECK((as_mat(polar_unitary(two)) - oracle::eye(4)).norm() < 1e-12);
}

TEST_CASE("polar_unitary: rank deficient input is rejected") {
  Tensor g({2, 2}, {1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(polar_unitary(g), DegenerateError);
}

TEST_CASE("polar_unitary beats random unitaries on Re Tr[g^dagger W]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const oracle::Mat g = oracle::random_matrix(rng, 4, 4);
    const oracle::Mat w = as_mat(polar_unitary(Tensor::from_matrix(g)));
    CHECK((w.adjoint() * w - oracle::eye(4)).norm() < 1e-12);
    const double best = (g.adjoint() * w).trace().real();
    const double dist = (g - w).norm();
    bool beaten = false;
    for (int k = 0; k < 10000; ++k) {
      const oracle::Mat r = oracle::random_unitary(rng, 4);
      if ((g.adjoint() * r).trace().real() > best + 1e-9) beaten = true;
      if ((g - r).norm() < dist - 1e-9) beaten = true;
    }
    CHECK_FALSE(beaten);
  }
}

TEST_CASE("qr and lq factor the input") {
  std::mt19937_64 rng(8);
  const RowMatrix a = oracle::random_matrix(rng, 6, 4);
  RowMatrix q, r, l, q2;
  linalg::qr(a, q, r);
  CHECK((q * r - a).norm() < 1e-12);
  CHECK((q.adjoint() * q - RowMatrix::Identity(4, 4)).norm() < 1e-12);
  const RowMatrix b = a.transpose();
  linalg::lq(b, l, q2);
  CHECK((l * q2 - b).norm() < 1e-12);
  CHECK((q2 * q2.adjoint() - RowMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("expm_hermitian matches the series exponential") {
  std::mt19937_64 rng(9);
  oracle::Mat h = oracle::random_matrix(rng, 4, 4);
  h = (h + h.adjoint()).eval();
  const oracle::Mat ref = oracle::expm(cplx(0, -0.3) * h);
  CHECK((linalg::expm_hermitian(h, cplx(0, -0.3)) - ref).norm() < 1e-12);
}
