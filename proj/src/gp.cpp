#include "platoon/gp.hpp"

#include <algorithm>
#include <cmath>

#include "platoon/rng.hpp"

namespace platoon::gp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

Dataset::Dataset(Inputs in, Eigen::VectorXd t) : inputs(std::move(in)), targets(std::move(t)) {
  if (inputs.cols() != targets.size()) {
    throw DimensionMismatch("Dataset: input and target counts differ");
  }
  if (targets.size() < 1) {
    throw std::invalid_argument("Dataset: needs at least one sample");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite values");
  }
}

Model Model::build(Dataset data, Hyperparams h, const std::vector<double>& jitter) {
  h.validate();
  Eigen::MatrixXd k = gram_matrix(data.inputs, h);
  k.diagonal().array() += h.noise_var;
  linalg::CholFactor chol = linalg::cholesky(linalg::SymMatrix(std::move(k)), jitter);
  Eigen::VectorXd alpha = linalg::chol_solve(chol, data.targets);
  return Model(std::move(data), h, std::move(chol), std::move(alpha));
}

Model Model::prior(Hyperparams h) {
  h.validate();
  return Model(Dataset{}, h, linalg::CholFactor{}, Eigen::VectorXd{});
}

Model Model::from_parts(Dataset data, Hyperparams h, linalg::CholFactor chol,
                        Eigen::VectorXd alpha) {
  h.validate();
  if (chol.size() != data.size() || alpha.size() != data.size()) {
    throw DimensionMismatch("Model::from_parts: inconsistent sizes");
  }
  return Model(std::move(data), h, std::move(chol), std::move(alpha));
}

Prediction Model::predict(const Input& x) const {
  const Eigen::Index m = data_.size();
  if (m == 0) {
    return {0.0, h_.signal_var};
  }
  Eigen::VectorXd kx(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    kx(i) = se_kernel(x, data_.inputs.col(i), h_);
  }
  const double mean = kx.dot(alpha_);
  const Eigen::VectorXd v = chol_.L.triangularView<Eigen::Lower>().solve(kx);
  double var = h_.signal_var - v.squaredNorm();
  if (var < 0.0) {
    if (var < -1e-9) {
      throw std::runtime_error("GP predict: posterior variance " + std::to_string(var) +
                               " below -1e-9");
    }
    var = 0.0;
  }
  return {mean, var};
}

std::vector<Prediction> Model::predict_batch_serial(const Inputs& xs) const {
  std::vector<Prediction> out(static_cast<std::size_t>(xs.cols()));
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(xs.col(i));
  }
  return out;
}

std::vector<Prediction> Model::predict_batch(const Inputs& xs) const {
  std::vector<Prediction> out(static_cast<std::size_t>(xs.cols()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(xs.col(i));
  }
  return out;
}

LogMarginal log_marginal_likelihood(const Hyperparams& h, const Dataset& data) {
  h.validate();
  const Eigen::Index m = data.size();
  if (m == 0) {
    throw std::invalid_argument("log_marginal_likelihood: empty dataset");
  }
  Eigen::MatrixXd kse = gram_matrix(data.inputs, h);
  Eigen::MatrixXd k = kse;
  k.diagonal().array() += h.noise_var;
  linalg::CholFactor chol = linalg::cholesky(linalg::SymMatrix(std::move(k)));
  Eigen::VectorXd alpha = linalg::chol_solve(chol, data.targets);

  LogMarginal out;
  out.value = -0.5 * data.targets.dot(alpha) - chol.log_det_half() -
              0.5 * static_cast<double>(m) * kLog2Pi;

  // W = alpha alpha^T - K^{-1}; grad_theta = 0.5 * sum(W .* dK/dtheta)
  Eigen::MatrixXd kinv = chol.L.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(m, m));
  kinv = chol.L.transpose().triangularView<Eigen::Upper>().solve(kinv);

  double g_sig = 0.0, g_l1 = 0.0, g_l2 = 0.0, g_noise = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : g_sig, g_l1, g_l2, g_noise)
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = alpha(i) * alpha(j) - kinv(i, j);
      const double d0 = data.inputs(0, i) - data.inputs(0, j);
      const double d1 = data.inputs(1, i) - data.inputs(1, j);
      const double ks = kse(i, j);
      g_sig += w * ks;
      g_l1 += w * ks * (0.5 * d0 * d0 / h.length_sq(0));
      g_l2 += w * ks * (0.5 * d1 * d1 / h.length_sq(1));
      if (i == j) {
        g_noise += w * h.noise_var;
      }
    }
  }
  out.grad << 0.5 * g_sig, 0.5 * g_l1, 0.5 * g_l2, 0.5 * g_noise;
  return out;
}

Hyperparams heuristic_init(const Dataset& data) {
  Hyperparams h;
  const double var_d = (data.targets.array() - data.targets.mean()).square().mean();
  h.signal_var = std::max(var_d, 1e-4);
  h.noise_var = std::max(0.1 * var_d, 1e-5);
  for (int d = 0; d < 2; ++d) {
    const auto row = data.inputs.row(d);
    const double sd2 = (row.array() - row.mean()).square().mean();
    h.length_sq(d) = std::max(sd2, 1e-2);
  }
  return h;
}

namespace {

Eigen::Vector4d to_log(const Hyperparams& h) {
  return {std::log(h.signal_var), std::log(h.length_sq(0)), std::log(h.length_sq(1)),
          std::log(h.noise_var)};
}

Hyperparams from_log(const Eigen::Vector4d& t) {
  Hyperparams h;
  h.signal_var = std::exp(t(0));
  h.length_sq << std::exp(t(1)), std::exp(t(2));
  h.noise_var = std::exp(t(3));
  return h;
}

Eigen::Vector4d clamp_log(Eigen::Vector4d t, const TrainerOptions& o) {
  t(0) = std::clamp(t(0), std::log(o.var_min), std::log(o.var_max));
  t(1) = std::clamp(t(1), std::log(o.length_sq_min), std::log(o.length_sq_max));
  t(2) = std::clamp(t(2), std::log(o.length_sq_min), std::log(o.length_sq_max));
  t(3) = std::clamp(t(3), std::log(o.var_min), std::log(o.var_max));
  return t;
}

struct AscentResult {
  Eigen::Vector4d theta;
  double value = -std::numeric_limits<double>::infinity();
  bool diverged = false;
};

double value_at(const Eigen::Vector4d& theta, const Dataset& data) {
  try {
    const Hyperparams h = from_log(theta);
    Eigen::MatrixXd k = gram_matrix(data.inputs, h);
    k.diagonal().array() += h.noise_var;
    linalg::CholFactor chol = linalg::cholesky(linalg::SymMatrix(std::move(k)));
    Eigen::VectorXd alpha = linalg::chol_solve(chol, data.targets);
    return -0.5 * data.targets.dot(alpha) - chol.log_det_half() -
           0.5 * static_cast<double>(data.size()) * kLog2Pi;
  } catch (const NotPositiveDefinite&) {
    return -std::numeric_limits<double>::infinity();
  }
}

AscentResult ascend(Eigen::Vector4d theta, const Dataset& data, const TrainerOptions& opts) {
  theta = clamp_log(theta, opts);
  double value = value_at(theta, data);
  for (int it = 0; it < opts.max_iters; ++it) {
    LogMarginal lm;
    try {
      lm = log_marginal_likelihood(from_log(theta), data);
    } catch (const NotPositiveDefinite&) {
      break;
    }
    value = lm.value;
    if (std::isnan(value)) {
      return {theta, value, true};
    }
    // project the gradient: zero components pushing against an active bound
    Eigen::Vector4d g = lm.grad;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector4d probe = clamp_log(theta + 1e-12 * Eigen::Vector4d::Unit(i) * (g(i) > 0 ? 1 : -1), opts);
      if (probe(i) == theta(i)) g(i) = 0.0;
    }
    if (g.norm() <= opts.grad_tol) {
      break;
    }
    // backtracking line search on the ascent direction
    double step = 1.0 / std::max(1.0, g.norm());
    bool improved = false;
    for (int ls = 0; ls < 20; ++ls) {
      const Eigen::Vector4d cand = clamp_log(theta + step * g, opts);
      const double cand_value = value_at(cand, data);
      if (cand_value > value + 1e-4 * g.dot(cand - theta)) {
        theta = cand;
        value = cand_value;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      break;
    }
  }
  return {theta, value};
}

}  // namespace

Model fit(const Dataset& data, const Hyperparams& init, const TrainerOptions& opts) {
  if (data.size() < 2) {
    throw std::invalid_argument("fit: needs at least two samples");
  }
  init.validate();
  const int n_restarts = std::max(1, opts.restarts);
  std::vector<AscentResult> results(static_cast<std::size_t>(n_restarts));

#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < n_restarts; ++r) {
    Eigen::Vector4d theta = to_log(init);
    if (r > 0) {
      // perturb the start in log space, reproducible per restart index
      Rng rng = Rng::substream(opts.seed, static_cast<std::uint64_t>(r));
      for (int i = 0; i < 4; ++i) {
        theta(i) += rng.gaussian();
      }
    }
    results[static_cast<std::size_t>(r)] = ascend(theta, data, opts);
  }

  int best = 0;
  for (int r = 1; r < n_restarts; ++r) {
    if (results[static_cast<std::size_t>(r)].value > results[static_cast<std::size_t>(best)].value) {
      best = r;
    }
  }
  const AscentResult& winner = results[static_cast<std::size_t>(best)];
  if (!std::isfinite(winner.value) || winner.diverged) {
    throw TrainingDiverged("fit: no restart produced a finite log marginal likelihood");
  }
  return Model::build(data, from_log(winner.theta));
}

}  // namespace platoon::gp
