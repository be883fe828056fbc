#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "platoon/rng.hpp"
#include "platoon/sparse_gp.hpp"
#include "support/oracles.hpp"

using namespace platoon;

namespace {

gp::Dataset smooth_dataset(Eigen::Index m, Rng& rng, double noise = 0.05) {
  gp::Inputs x(2, m);
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(0, i) = 20.0 * rng.uniform();
    x(1, i) = 20.0 * rng.uniform();
    d(i) = std::sin(x(0, i) / 4.0) - 0.4 * std::cos(x(1, i) / 3.0) + noise * rng.gaussian();
  }
  return gp::Dataset(std::move(x), std::move(d));
}

gp::Hyperparams test_hyper() {
  gp::Hyperparams h;
  h.signal_var = 0.8;
  h.length_sq << 9.0, 9.0;
  h.noise_var = 0.01;
  return h;
}

// literal dense construction of the FIC posterior via explicit inverses
gp::Prediction fic_dense_oracle(const gp::Hyperparams& h, const gp::Inputs& z,
                                const gp::Dataset& data, const gp::Input& x) {
  const Eigen::Index m = data.size();
  const Eigen::Index mt = z.cols();
  Eigen::MatrixXd kuu(mt, mt), kfu(m, mt);
  for (Eigen::Index i = 0; i < mt; ++i) {
    for (Eigen::Index j = 0; j < mt; ++j) {
      kuu(i, j) = gp::se_kernel(z.col(i), z.col(j), h);
    }
    kuu(i, i) += 1e-10;  // same floor jitter as the implementation
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < mt; ++j) {
      kfu(i, j) = gp::se_kernel(data.inputs.col(i), z.col(j), h);
    }
  }
  const Eigen::MatrixXd kuu_inv = oracles::gauss_jordan_inverse(kuu);
  const Eigen::MatrixXd qff = kfu * kuu_inv * kfu.transpose();
  Eigen::MatrixXd cov = qff;
  for (Eigen::Index i = 0; i < m; ++i) {
    cov(i, i) = h.signal_var + h.noise_var;  // Q_ff + diag(K_ff - Q_ff) + noise
  }
  const Eigen::MatrixXd cov_inv = oracles::gauss_jordan_inverse(cov);

  Eigen::VectorXd kxu(mt), kxf(m);
  for (Eigen::Index j = 0; j < mt; ++j) {
    kxu(j) = gp::se_kernel(x, z.col(j), h);
  }
  // FIC treats the test point through the inducing set as well
  const Eigen::VectorXd qxf = kfu * (kuu_inv * kxu);
  const double mean = qxf.dot(cov_inv * data.targets);
  const double var =
      h.signal_var - qxf.dot(cov_inv * qxf) -
      (kxu.dot(kuu_inv * kxu) - kxu.dot(kuu_inv * kxu));  // test-vs-test uses exact k_xx
  return {mean, var};
}

}  // namespace

TEST_CASE("FIC with the full training set as inducing points equals the exact GP") {
  Rng rng(5);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(60, rng);
  const gp::Model exact = gp::Model::build(data, h);
  const gp::SparseModel sparse = gp::fic_precompute(h, gp::InducingSet{data.inputs}, data);
  for (int q = 0; q < 100; ++q) {
    const gp::Input x{25.0 * rng.uniform(), 25.0 * rng.uniform()};
    const auto a = exact.predict(x);
    const auto b = sparse.predict(x);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-6));
    CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-6));
  }
}

TEST_CASE("FIC matches the dense-construction oracle") {
  Rng rng(7);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(15, rng);
  gp::Inputs z(2, 4);
  for (int j = 0; j < 4; ++j) {
    z.col(j) = data.inputs.col(j * 4);
  }
  const gp::SparseModel sparse = gp::fic_precompute(h, gp::InducingSet{z}, data);
  for (int q = 0; q < 25; ++q) {
    const gp::Input x{22.0 * rng.uniform(), 22.0 * rng.uniform()};
    const auto got = sparse.predict(x);
    const auto want = fic_dense_oracle(h, z, data, x);
    CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
    CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-8));
  }
}

TEST_CASE("FIC reverts to the prior far from the inducing set") {
  Rng rng(9);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(40, rng);
  gp::Inputs z = data.inputs.leftCols(8);
  const gp::SparseModel sparse = gp::fic_precompute(h, gp::InducingSet{z}, data);
  const auto p = sparse.predict({800.0, 800.0});
  CHECK(p.mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(p.variance == doctest::Approx(h.signal_var).epsilon(1e-9));
}

TEST_CASE("FIC variance is nonnegative across the input box") {
  Rng rng(13);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(80, rng);
  const gp::Model full = gp::Model::build(data, h);
  const gp::InducingSet z = gp::select_inducing(full, 12, {.max_iters = 10});
  const gp::SparseModel sparse = gp::fic_precompute(h, z, data);
  for (int gx = 0; gx < 50; ++gx) {
    for (int gy = 0; gy < 50; ++gy) {
      const auto p = sparse.predict({35.0 * gx / 49.0, 35.0 * gy / 49.0});
      CHECK(p.variance >= 0.0);
      CHECK(p.variance <= h.signal_var + 1e-9);
    }
  }
}

TEST_CASE("inducing selection never loses marginal likelihood") {
  Rng rng(17);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(40, rng);
  const gp::Model full = gp::Model::build(data, h);
  // stride init with m_tilde = m is the full input set
  const double initial = gp::fic_log_marginal(h, data.inputs, data);
  const gp::InducingSet z = gp::select_inducing(full, static_cast<int>(data.size()),
                                                {.max_iters = 8});
  const double final_lml = gp::fic_log_marginal(h, z.points, data);
  CHECK(final_lml >= initial - 1e-9);
}

TEST_CASE("inducing points land on the data clusters") {
  Rng rng(19);
  const double centers[3][2] = {{10, 10}, {15, 15}, {20, 20}};
  const Eigen::Index per = 30;
  gp::Inputs x(2, 3 * per);
  Eigen::VectorXd d(3 * per);
  for (int c = 0; c < 3; ++c) {
    for (Eigen::Index i = 0; i < per; ++i) {
      const Eigen::Index col = c * per + i;
      x(0, col) = centers[c][0] + 0.3 * rng.gaussian();
      x(1, col) = centers[c][1] + 0.3 * rng.gaussian();
      d(col) = 0.5 * c + 0.05 * rng.gaussian();
    }
  }
  const gp::Dataset data(x, d);
  gp::Hyperparams h = test_hyper();
  h.length_sq << 4.0, 4.0;
  const gp::Model full = gp::Model::build(data, h);
  const gp::InducingSet z = gp::select_inducing(full, 3, {.max_iters = 40});

  Rng krng(23);
  const Eigen::Matrix2Xd km = oracles::kmeans_2d(x, 3, krng);
  for (int c = 0; c < 3; ++c) {
    double best = 1e300;
    for (int j = 0; j < 3; ++j) {
      best = std::min(best, (km.col(c) - z.points.col(j)).norm());
    }
    CHECK(best <= 1.0);
  }
}

TEST_CASE("batch prediction equals one-at-a-time calls") {
  Rng rng(29);
  const gp::Hyperparams h = test_hyper();
  const gp::Dataset data = smooth_dataset(50, rng);
  const gp::SparseModel sparse =
      gp::fic_precompute(h, gp::InducingSet{data.inputs.leftCols(10)}, data);
  const gp::Dataset queries = smooth_dataset(64, rng);
  const auto batch = sparse.predict_batch(queries.inputs);
  for (Eigen::Index i = 0; i < queries.inputs.cols(); ++i) {
    const auto one = sparse.predict(queries.inputs.col(i));
    CHECK(batch[static_cast<std::size_t>(i)].mean == one.mean);
    CHECK(batch[static_cast<std::size_t>(i)].variance == one.variance);
  }
}

TEST_CASE("select_inducing rejects bad counts") {
  Rng rng(31);
  const gp::Dataset data = smooth_dataset(10, rng);
  const gp::Model full = gp::Model::build(data, test_hyper());
  CHECK_THROWS_AS(gp::select_inducing(full, 0), std::invalid_argument);
  CHECK_THROWS_AS(gp::select_inducing(full, 11), std::invalid_argument);
}
