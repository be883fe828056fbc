#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "platoon/linalg.hpp"
#include "platoon/rng.hpp"
#include "support/oracles.hpp"

using namespace platoon;
using linalg::CholFactor;
using linalg::SymMatrix;

TEST_CASE("cholesky of identity needs no jitter") {
  const CholFactor f = linalg::cholesky(SymMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(f.jitter == 0.0);
  CHECK((f.L - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("cholesky matches the hand factorization") {
  Eigen::MatrixXd m(2, 2);
  m << 4, 2, 2, 3;
  const CholFactor f = linalg::cholesky(SymMatrix(m));
  CHECK(f.L(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.L(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.L(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(f.L(0, 1) == 0.0);
}

TEST_CASE("rank-deficient matrix forces jitter") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  const CholFactor f = linalg::cholesky(SymMatrix(m), {0.0, 1e-6});
  CHECK(f.jitter == 1e-6);
  CHECK_THROWS_AS(linalg::cholesky(SymMatrix(m), {0.0}), NotPositiveDefinite);
}

TEST_CASE("SymMatrix rejects bad input") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 3, 1;
  CHECK_THROWS(SymMatrix(asym));
  Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS(SymMatrix(nan));
}

TEST_CASE("chol_solve basics") {
  const CholFactor id = linalg::cholesky(SymMatrix(Eigen::MatrixXd::Identity(2, 2)));
  Eigen::VectorXd b(2);
  b << 1, 2;
  CHECK((linalg::chol_solve(id, b) - b).norm() == doctest::Approx(0.0));

  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  const CholFactor fd = linalg::cholesky(SymMatrix(d));
  Eigen::VectorXd rhs(2);
  rhs << 8, 27;
  const Eigen::VectorXd x = linalg::chol_solve(fd, rhs);
  CHECK(x(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(3.0).epsilon(1e-14));

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(linalg::chol_solve(fd, wrong), DimensionMismatch);
}

TEST_CASE("chol_solve agrees with the explicit-inverse oracle") {
  Rng rng(11);
  const Eigen::MatrixXd m = oracles::random_spd(5, rng);
  const CholFactor f = linalg::cholesky(SymMatrix(m));
  Eigen::VectorXd b(5);
  for (int i = 0; i < 5; ++i) {
    b(i) = rng.gaussian();
  }
  const Eigen::VectorXd x = linalg::chol_solve(f, b);
  const Eigen::VectorXd xo = oracles::gauss_jordan_inverse(m) * b;
  CHECK((x - xo).norm() <= 1e-8 * b.norm());
}

TEST_CASE("cholesky+solve reproduces explicit inverses over random SPD instances") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.integer() % 7);
    // eigenvalue spread keeps the condition number well under 1e10
    const Eigen::MatrixXd m = oracles::random_spd(n, rng, 1e-4, 1e3);
    const CholFactor f = linalg::cholesky(SymMatrix(m));
    const Eigen::MatrixXd inv = oracles::gauss_jordan_inverse(m);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      b(i) = rng.gaussian();
    }
    const Eigen::VectorXd x = linalg::chol_solve(f, b);
    CHECK((x - inv * b).norm() <= 1e-7 * std::max(1.0, (inv * b).norm()));
    CHECK((m * x - b).norm() <= 1e-7 * b.norm());
  }
}

TEST_CASE("normal_inv_cdf hits tabled quantiles") {
  CHECK(linalg::normal_inv_cdf(0.5) == 0.0);
  CHECK(linalg::normal_inv_cdf(0.95) == doctest::Approx(1.6449).epsilon(1e-4));
  CHECK(linalg::normal_inv_cdf(0.975) == doctest::Approx(1.9600).epsilon(1e-4));
  // against the independent series oracle
  CHECK(linalg::normal_inv_cdf(0.95) == doctest::Approx(oracles::inv_cdf_bisect(0.95)).epsilon(1e-9));
  CHECK(linalg::normal_inv_cdf(0.975) ==
        doctest::Approx(oracles::inv_cdf_bisect(0.975)).epsilon(1e-9));
}

TEST_CASE("normal_inv_cdf domain errors") {
  CHECK_THROWS_AS(linalg::normal_inv_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(linalg::normal_inv_cdf(1.0), std::domain_error);
  CHECK_THROWS_AS(linalg::normal_inv_cdf(-0.5), std::domain_error);
  CHECK_THROWS_AS(linalg::normal_inv_cdf(2.0), std::domain_error);
}

TEST_CASE("normal_inv_cdf satisfies |Phi(z) - p| <= 1e-10") {
  for (int k = 1; k < 1000; ++k) {
    const double p = k / 1000.0;
    const double z = linalg::normal_inv_cdf(p);
    CHECK(std::abs(oracles::cdf_oracle(z) - p) <= 1e-10);
  }
}

TEST_CASE("round trip z -> Phi -> inverse over [-6, 6]") {
  for (double z = -6.0; z <= 6.0; z += 0.25) {
    const double p = linalg::normal_cdf(z);
    CHECK(linalg::normal_inv_cdf(p) == doctest::Approx(z).epsilon(1e-6));
  }
}

TEST_CASE("antisymmetry at dyadic probabilities") {
  for (int k = 1; k < 1024; ++k) {
    const double p = k / 1024.0;  // 1-p is exact in binary
    CHECK(std::abs(linalg::normal_inv_cdf(1.0 - p) + linalg::normal_inv_cdf(p)) <= 1e-12);
  }
}
