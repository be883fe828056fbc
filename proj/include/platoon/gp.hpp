#ifndef PLATOON_GP_HPP
#define PLATOON_GP_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "platoon/kernel.hpp"
#include "platoon/linalg.hpp"

namespace platoon::gp {

/// Input/target pairs for the discrepancy regression.
struct Dataset {
  Inputs inputs;            // 2 x m
  Eigen::VectorXd targets;  // m

  Dataset() = default;
  Dataset(Inputs in, Eigen::VectorXd t);
  Eigen::Index size() const { return targets.size(); }
};

struct Prediction {
  double mean = 0.0;      // m/s
  double variance = 0.0;  // m^2/s^2
};

/// Common interface for the exact and sparse posteriors, so the HV model can
/// swap one for the other.
class DiscrepancyPredictor {
 public:
  virtual ~DiscrepancyPredictor() = default;
  virtual Prediction predict(const Input& x) const = 0;
  virtual double prior_variance() const = 0;
};

/// Fixed zero-discrepancy predictor (degenerate GP). Useful for nominal-mode
/// plants and equivalence tests.
class ZeroPredictor final : public DiscrepancyPredictor {
 public:
  Prediction predict(const Input&) const override { return {0.0, 0.0}; }
  double prior_variance() const override { return 0.0; }
};

/// Exact single-output GP posterior with precomputed Cholesky factor and
/// weight vector alpha = (K + I sigma^2)^{-1} d. Immutable after build.
class Model final : public DiscrepancyPredictor {
 public:
  /// Condition on data with fixed hyperparameters.
  static Model build(Dataset data, Hyperparams h,
                     const std::vector<double>& jitter = linalg::default_jitter_schedule());
  /// Zero-mean prior, no data.
  static Model prior(Hyperparams h);

  /// Reassemble from serialized pieces; dimensions are checked, the factor
  /// is trusted.
  static Model from_parts(Dataset data, Hyperparams h, linalg::CholFactor chol,
                          Eigen::VectorXd alpha);

  Prediction predict(const Input& x) const override;
  double prior_variance() const override { return h_.signal_var; }

  std::vector<Prediction> predict_batch_serial(const Inputs& xs) const;
  std::vector<Prediction> predict_batch(const Inputs& xs) const;  // OpenMP

  const Dataset& data() const { return data_; }
  const Hyperparams& hyperparams() const { return h_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const linalg::CholFactor& factor() const { return chol_; }

 private:
  Model(Dataset data, Hyperparams h, linalg::CholFactor chol, Eigen::VectorXd alpha)
      : data_(std::move(data)), h_(h), chol_(std::move(chol)), alpha_(std::move(alpha)) {}

  Dataset data_;
  Hyperparams h_;
  linalg::CholFactor chol_;
  Eigen::VectorXd alpha_;
};

struct LogMarginal {
  double value = 0.0;
  // gradient w.r.t. log(sigma_f^2), log(l1^2), log(l2^2), log(sigma^2)
  Eigen::Vector4d grad = Eigen::Vector4d::Zero();
};

LogMarginal log_marginal_likelihood(const Hyperparams& h, const Dataset& data);

struct TrainerOptions {
  int max_iters = 150;
  double grad_tol = 1e-5;
  int restarts = 5;
  std::uint64_t seed = 0;
  // hyperparameter box, natural units
  double var_min = 1e-6, var_max = 1e3;        // sigma_f^2 and sigma^2
  double length_sq_min = 1e-4, length_sq_max = 1e6;
};

/// Maximize the log marginal likelihood by projected gradient ascent with a
/// backtracking line search, best of `restarts` starts (run concurrently).
Model fit(const Dataset& data, const Hyperparams& init, const TrainerOptions& opts = {});

/// Heuristic initialization: signal var = var(d), noise = 0.1 var(d),
/// lengthscale_i = std of input dimension i.
Hyperparams heuristic_init(const Dataset& data);

}  // namespace platoon::gp

#endif
