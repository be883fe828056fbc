#ifndef PLATOON_SPARSE_GP_HPP
#define PLATOON_SPARSE_GP_HPP

#include "platoon/gp.hpp"

namespace platoon::gp {

struct InducingSet {
  Inputs points;  // 2 x M

  Eigen::Index size() const { return points.cols(); }
};

/// FIC posterior compressed onto the inducing set: prediction cost depends
/// only on the inducing count. Immutable after build.
class SparseModel final : public DiscrepancyPredictor {
 public:
  static SparseModel build(const Hyperparams& h, const InducingSet& z, const Dataset& data);

  Prediction predict(const Input& x) const override;
  double prior_variance() const override { return h_.signal_var; }

  std::vector<Prediction> predict_batch_serial(const Inputs& xs) const;
  std::vector<Prediction> predict_batch(const Inputs& xs) const;

  const Hyperparams& hyperparams() const { return h_; }
  const InducingSet& inducing() const { return z_; }
  const Eigen::MatrixXd& chol_kuu() const { return luu_; }
  const Eigen::MatrixXd& chol_a() const { return la_; }
  const Eigen::VectorXd& weights() const { return w_; }

  /// Rebuild from serialized factors; trusts the caller's dimensions.
  static SparseModel from_factors(Hyperparams h, InducingSet z, Eigen::MatrixXd luu,
                                  Eigen::MatrixXd la, Eigen::VectorXd w);

 private:
  SparseModel(Hyperparams h, InducingSet z, Eigen::MatrixXd luu, Eigen::MatrixXd la,
              Eigen::VectorXd w)
      : h_(h), z_(std::move(z)), luu_(std::move(luu)), la_(std::move(la)), w_(std::move(w)) {}

  Hyperparams h_;
  InducingSet z_;
  Eigen::MatrixXd luu_;  // chol(K_uu + jitter)
  Eigen::MatrixXd la_;   // chol(K_uu + K_uf Lam^-1 K_fu)
  Eigen::VectorXd w_;    // A^-1 K_uf Lam^-1 d
};

/// Marginal likelihood of the FIC approximation (training covariance
/// Q_ff + diag(K_ff - Q_ff) + I sigma^2).
double fic_log_marginal(const Hyperparams& h, const Inputs& z, const Dataset& data);

/// Alias matching the operational name: precompute the FIC factors.
SparseModel fic_precompute(const Hyperparams& h, const InducingSet& z, const Dataset& data);

struct SelectOptions {
  int max_iters = 60;
  double tol = 1e-3;        // stop when the FD gradient norm falls below this
  double fd_step = 1e-4;    // central-difference step on each coordinate
};

/// Pick inducing locations by gradient ascent (central differences) on the
/// FIC marginal likelihood from a uniform-stride initialization.
/// Hyperparameters stay fixed at the full model's values.
InducingSet select_inducing(const Model& full, int m_tilde, const SelectOptions& opts = {});

}  // namespace platoon::gp

#endif
