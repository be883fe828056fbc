#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "platoon/gp.hpp"
#include "platoon/rng.hpp"
#include "support/oracles.hpp"

using namespace platoon;

namespace {

gp::Dataset random_dataset(Eigen::Index m, Rng& rng, double noise = 0.05) {
  gp::Inputs x(2, m);
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(0, i) = 20.0 * rng.uniform();
    x(1, i) = 20.0 * rng.uniform();
    d(i) = std::sin(x(0, i) / 4.0) + 0.3 * std::cos(x(1, i) / 5.0) + noise * rng.gaussian();
  }
  return gp::Dataset(std::move(x), std::move(d));
}

gp::Hyperparams test_hyper() {
  gp::Hyperparams h;
  h.signal_var = 1.2;
  h.length_sq << 9.0, 16.0;
  h.noise_var = 0.01;
  return h;
}

// posterior through an explicit inverse, no Cholesky anywhere
gp::Prediction predict_oracle(const gp::Dataset& data, const gp::Hyperparams& h,
                              const gp::Input& x) {
  const Eigen::Index m = data.size();
  Eigen::MatrixXd k(m, m);
  Eigen::VectorXd kx(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kx(i) = gp::se_kernel(x, data.inputs.col(i), h);
    for (Eigen::Index j = 0; j < m; ++j) {
      k(i, j) = gp::se_kernel(data.inputs.col(i), data.inputs.col(j), h);
    }
    k(i, i) += h.noise_var;
  }
  const Eigen::MatrixXd kinv = oracles::gauss_jordan_inverse(k);
  return {kx.dot(kinv * data.targets), h.signal_var - kx.dot(kinv * kx)};
}

}  // namespace

TEST_CASE("se_kernel closed forms") {
  gp::Hyperparams h = test_hyper();
  h.signal_var = 2.5;
  CHECK(gp::se_kernel({3.0, 4.0}, {3.0, 4.0}, h) == doctest::Approx(2.5).epsilon(1e-15));

  h.signal_var = 1.7;
  const double l1 = std::sqrt(h.length_sq(0));
  CHECK(gp::se_kernel({l1, 0.0}, {0.0, 0.0}, h) ==
        doctest::Approx(1.7 * std::exp(-0.5)).epsilon(1e-14));

  gp::Hyperparams hh;
  hh.signal_var = 1.0;
  hh.length_sq << 25.0, 4.0;
  hh.noise_var = 0.1;
  CHECK(gp::se_kernel({10.0, 10.0}, {15.0, 12.0}, hh) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("se_kernel is symmetric in its arguments") {
  Rng rng(3);
  const gp::Hyperparams h = test_hyper();
  for (int i = 0; i < 50; ++i) {
    const gp::Input a{30 * rng.uniform(), 30 * rng.uniform()};
    const gp::Input b{30 * rng.uniform(), 30 * rng.uniform()};
    CHECK(gp::se_kernel(a, b, h) == gp::se_kernel(b, a, h));
  }
}

TEST_CASE("log marginal likelihood closed form for one point") {
  gp::Inputs x(2, 1);
  x << 5.0, 7.0;
  const gp::Dataset data(x, Eigen::VectorXd::Zero(1));
  const gp::Hyperparams h = test_hyper();
  const auto lm = gp::log_marginal_likelihood(h, data);
  CHECK(lm.value ==
        doctest::Approx(-0.5 * std::log(2 * M_PI * (h.signal_var + h.noise_var))).epsilon(1e-12));
}

TEST_CASE("zero targets kill the data-fit term") {
  Rng rng(5);
  gp::Dataset data = random_dataset(8, rng);
  data.targets.setZero();
  const gp::Hyperparams h = test_hyper();
  const auto lm = gp::log_marginal_likelihood(h, data);
  // value must equal the pure complexity term
  Eigen::MatrixXd k = gp::gram_matrix(data.inputs, h);
  k.diagonal().array() += h.noise_var;
  const auto f = linalg::cholesky(linalg::SymMatrix(k));
  CHECK(lm.value == doctest::Approx(-f.log_det_half() - 4.0 * std::log(2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("analytic LML gradient matches central differences") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const gp::Dataset data = random_dataset(10, rng);
    gp::Hyperparams h;
    h.signal_var = 0.5 + rng.uniform();
    h.length_sq << 4.0 + 10.0 * rng.uniform(), 4.0 + 10.0 * rng.uniform();
    h.noise_var = 0.02 + 0.1 * rng.uniform();
    const auto lm = gp::log_marginal_likelihood(h, data);

    const double eps = 1e-5;
    auto value_at = [&](int dim, double delta) {
      gp::Hyperparams hp = h;
      double* fields[4] = {&hp.signal_var, &hp.length_sq(0), &hp.length_sq(1), &hp.noise_var};
      *fields[dim] = std::exp(std::log(*fields[dim]) + delta);
      return gp::log_marginal_likelihood(hp, data).value;
    };
    for (int dim = 0; dim < 4; ++dim) {
      const double fd = (value_at(dim, eps) - value_at(dim, -eps)) / (2 * eps);
      CHECK(lm.grad(dim) ==
            doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("predict interpolates near-noiseless training points") {
  Rng rng(23);
  gp::Hyperparams h = test_hyper();
  h.noise_var = 1e-12;
  const gp::Dataset data = random_dataset(12, rng, 0.0);
  const gp::Model model = gp::Model::build(data, h);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto p = model.predict(data.inputs.col(i));
    CHECK(p.mean == doctest::Approx(data.targets(i)).epsilon(1e-6));
  }
}

TEST_CASE("predict reverts to the prior far from data") {
  Rng rng(29);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = random_dataset(10, rng);
  const gp::Model model = gp::Model::build(data, h);
  const auto p = model.predict({500.0, 500.0});
  CHECK(p.mean == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(p.variance == doctest::Approx(h.signal_var).epsilon(1e-6));
}

TEST_CASE("single-point posterior matches the hand formula") {
  gp::Inputs x(2, 1);
  x << 10.0, 12.0;
  Eigen::VectorXd d(1);
  d << 0.7;
  const gp::Dataset data(x, d);
  const gp::Hyperparams h = test_hyper();
  const gp::Model model = gp::Model::build(data, h);
  const gp::Input q{11.0, 13.0};
  const double kxa = gp::se_kernel(q, x.col(0), h);
  const auto p = model.predict(q);
  CHECK(p.mean == doctest::Approx(kxa * 0.7 / (h.signal_var + h.noise_var)).epsilon(1e-10));
  CHECK(p.variance ==
        doctest::Approx(h.signal_var - kxa * kxa / (h.signal_var + h.noise_var)).epsilon(1e-10));
}

TEST_CASE("Cholesky route equals the explicit-inverse oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.integer() % 18);
    const gp::Dataset data = random_dataset(m, rng);
    const gp::Hyperparams h = test_hyper();
    const gp::Model model = gp::Model::build(data, h);
    for (int q = 0; q < 5; ++q) {
      const gp::Input x{20 * rng.uniform(), 20 * rng.uniform()};
      const auto a = model.predict(x);
      const auto b = predict_oracle(data, h, x);
      CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-8));
      CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-8));
    }
  }
}

TEST_CASE("posterior variance stays within [0, signal variance]") {
  Rng rng(37);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = random_dataset(40, rng);
  const gp::Model model = gp::Model::build(data, h);
  for (int gx = 0; gx < 20; ++gx) {
    for (int gy = 0; gy < 20; ++gy) {
      const auto p = model.predict({35.0 * gx / 19.0, 35.0 * gy / 19.0});
      CHECK(p.variance >= 0.0);
      CHECK(p.variance <= h.signal_var + 1e-9);
    }
  }
}

TEST_CASE("adding a training point never increases posterior variance") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const gp::Hyperparams h = test_hyper();
    const gp::Dataset data = random_dataset(15, rng);
    gp::Inputs bigger(2, 16);
    bigger.leftCols(15) = data.inputs;
    bigger.col(15) = gp::Input{20 * rng.uniform(), 20 * rng.uniform()};
    Eigen::VectorXd targets(16);
    targets.head(15) = data.targets;
    targets(15) = rng.gaussian();
    const gp::Model small = gp::Model::build(data, h);
    const gp::Model big = gp::Model::build(gp::Dataset(bigger, targets), h);
    for (int q = 0; q < 20; ++q) {
      const gp::Input x{30 * rng.uniform(), 30 * rng.uniform()};
      CHECK(big.predict(x).variance <= small.predict(x).variance + 1e-8);
    }
  }
}

TEST_CASE("fit recovers known hyperparameters from sampled data") {
  Rng rng(57);
  gp::Hyperparams truth;
  truth.signal_var = 1.0;
  truth.length_sq << 4.0, 4.0;  // lengthscale 2 in both dimensions
  truth.noise_var = 0.01;

  const Eigen::Index m = 200;
  gp::Inputs x(2, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(0, i) = 12.0 * rng.uniform();
    x(1, i) = 12.0 * rng.uniform();
  }
  Eigen::MatrixXd k = gp::gram_matrix(x, truth);
  k.diagonal().array() += 1e-10;
  const auto f = linalg::cholesky(linalg::SymMatrix(k));
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    z(i) = rng.gaussian();
  }
  Eigen::VectorXd d = f.L * z;
  for (Eigen::Index i = 0; i < m; ++i) {
    d(i) += std::sqrt(truth.noise_var) * rng.gaussian();
  }
  const gp::Dataset data(x, d);

  gp::TrainerOptions opts;
  opts.restarts = 3;
  opts.max_iters = 120;
  const gp::Model model = gp::fit(data, gp::heuristic_init(data), opts);
  const gp::Hyperparams& got = model.hyperparams();
  CHECK(std::abs(std::log(got.signal_var / truth.signal_var)) <= 0.5);
  CHECK(std::abs(std::log(got.length_sq(0) / truth.length_sq(0))) <= 0.5);
  CHECK(std::abs(std::log(got.length_sq(1) / truth.length_sq(1))) <= 0.5);
  CHECK(std::abs(std::log(got.noise_var / truth.noise_var)) <= 0.5);
}

TEST_CASE("constant-zero targets drive the signal variance to its floor") {
  Rng rng(61);
  gp::Dataset data = random_dataset(30, rng);
  data.targets.setZero();
  gp::TrainerOptions opts;
  opts.restarts = 1;
  opts.max_iters = 80;
  const gp::Model model = gp::fit(data, gp::heuristic_init(data), opts);
  CHECK(model.hyperparams().signal_var <= 1e-4);
}

TEST_CASE("more restarts never lose likelihood") {
  Rng rng(67);
  const gp::Dataset data = random_dataset(25, rng);
  gp::TrainerOptions one;
  one.restarts = 1;
  one.max_iters = 60;
  gp::TrainerOptions five = one;
  five.restarts = 5;
  const gp::Model m1 = gp::fit(data, gp::heuristic_init(data), one);
  const gp::Model m5 = gp::fit(data, gp::heuristic_init(data), five);
  const double l1 = gp::log_marginal_likelihood(m1.hyperparams(), data).value;
  const double l5 = gp::log_marginal_likelihood(m5.hyperparams(), data).value;
  CHECK(l5 >= l1 - 1e-9);
}

TEST_CASE("prior model predicts zero mean and full variance") {
  const gp::Model prior = gp::Model::prior(test_hyper());
  const auto p = prior.predict({1.0, 2.0});
  CHECK(p.mean == 0.0);
  CHECK(p.variance == test_hyper().signal_var);
}

TEST_CASE("dataset validation") {
  gp::Inputs x(2, 2);
  x << 1, 2, 3, 4;
  CHECK_THROWS_AS(gp::Dataset(x, Eigen::VectorXd::Zero(3)), DimensionMismatch);
  Eigen::VectorXd bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS(gp::Dataset(x, bad));
}
