#include "platoon/sparse_gp.hpp"

#include <cmath>

namespace platoon::gp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

struct FicFactors {
  Eigen::MatrixXd luu;
  Eigen::MatrixXd la;
  Eigen::VectorXd w;
  Eigen::VectorXd lam;        // FIC diagonal: sigma_f^2 - q_ii + sigma^2
  Eigen::MatrixXd kfu;        // m x M
};

FicFactors fic_factorize(const Hyperparams& h, const Inputs& z, const Dataset& data) {
  h.validate();
  if (z.cols() < 1) {
    throw std::invalid_argument("fic: inducing set is empty");
  }
  const Eigen::Index m = data.size();
  const Eigen::Index mt = z.cols();

  Eigen::MatrixXd kuu = gram_matrix(z, h);
  const linalg::CholFactor luu = linalg::cholesky(linalg::SymMatrix(std::move(kuu)),
                                                  {1e-10, 1e-8, 1e-6, 1e-4});
  Eigen::MatrixXd kfu = cross_covariance(data.inputs, z, h);  // m x M

  // q_ii = k_iu^T K_uu^-1 k_iu via V = L^-1 K_uf
  Eigen::MatrixXd v = luu.L.triangularView<Eigen::Lower>().solve(kfu.transpose());  // M x m
  Eigen::VectorXd lam(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double qii = v.col(i).squaredNorm();
    lam(i) = std::max(h.signal_var - qii, 0.0) + h.noise_var;
  }

  Eigen::MatrixXd kuf_lam = kfu.transpose();  // M x m, scaled columns
  for (Eigen::Index i = 0; i < m; ++i) {
    kuf_lam.col(i) /= lam(i);
  }
  Eigen::MatrixXd a = luu.L * luu.L.transpose() + kuf_lam * kfu;
  a = 0.5 * (a + a.transpose());
  const linalg::CholFactor la = linalg::cholesky(linalg::SymMatrix(std::move(a)),
                                                 {0.0, 1e-10, 1e-8, 1e-6});
  Eigen::VectorXd rhs = kuf_lam * data.targets;
  Eigen::VectorXd w = linalg::chol_solve(la, rhs);

  FicFactors f;
  f.luu = luu.L;
  f.la = la.L;
  f.w = std::move(w);
  f.lam = std::move(lam);
  f.kfu = std::move(kfu);
  (void)mt;
  return f;
}

}  // namespace

SparseModel SparseModel::build(const Hyperparams& h, const InducingSet& z, const Dataset& data) {
  FicFactors f = fic_factorize(h, z.points, data);
  return SparseModel(h, z, std::move(f.luu), std::move(f.la), std::move(f.w));
}

SparseModel fic_precompute(const Hyperparams& h, const InducingSet& z, const Dataset& data) {
  return SparseModel::build(h, z, data);
}

SparseModel SparseModel::from_factors(Hyperparams h, InducingSet z, Eigen::MatrixXd luu,
                                      Eigen::MatrixXd la, Eigen::VectorXd w) {
  h.validate();
  return SparseModel(h, std::move(z), std::move(luu), std::move(la), std::move(w));
}

Prediction SparseModel::predict(const Input& x) const {
  const Eigen::Index mt = z_.size();
  Eigen::VectorXd kx(mt);
  for (Eigen::Index i = 0; i < mt; ++i) {
    kx(i) = se_kernel(x, z_.points.col(i), h_);
  }
  const double mean = kx.dot(w_);
  const Eigen::VectorXd v1 = luu_.triangularView<Eigen::Lower>().solve(kx);
  const Eigen::VectorXd v2 = la_.triangularView<Eigen::Lower>().solve(kx);
  double var = h_.signal_var - v1.squaredNorm() + v2.squaredNorm();
  if (var < 0.0) {
    if (var < -1e-9) {
      throw std::runtime_error("FIC predict: variance below -1e-9");
    }
    var = 0.0;
  }
  return {mean, var};
}

std::vector<Prediction> SparseModel::predict_batch_serial(const Inputs& xs) const {
  std::vector<Prediction> out(static_cast<std::size_t>(xs.cols()));
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(xs.col(i));
  }
  return out;
}

std::vector<Prediction> SparseModel::predict_batch(const Inputs& xs) const {
  std::vector<Prediction> out(static_cast<std::size_t>(xs.cols()));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(xs.col(i));
  }
  return out;
}

double fic_log_marginal(const Hyperparams& h, const Inputs& z, const Dataset& data) {
  const Eigen::Index m = data.size();
  FicFactors f = fic_factorize(h, z, data);

  // log det(Q + Lam) = log det Lam + log det A - log det K_uu
  double logdet = f.lam.array().log().sum();
  logdet += 2.0 * f.la.diagonal().array().log().sum();
  logdet -= 2.0 * f.luu.diagonal().array().log().sum();

  // d^T (Q + Lam)^-1 d = d^T Lam^-1 d - (Lam^-1 K_fu w)^T d   with w = A^-1 K_uf Lam^-1 d
  const Eigen::VectorXd dl = data.targets.array() / f.lam.array();
  const double quad = data.targets.dot(dl) - dl.dot(f.kfu * f.w);

  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(m) * kLog2Pi;
}

InducingSet select_inducing(const Model& full, int m_tilde, const SelectOptions& opts) {
  const Dataset& data = full.data();
  const Eigen::Index m = data.size();
  if (m_tilde < 1 || m_tilde > m) {
    throw std::invalid_argument("select_inducing: m_tilde out of range");
  }
  const Hyperparams& h = full.hyperparams();

  // uniform stride over training inputs
  Inputs z(2, m_tilde);
  for (int i = 0; i < m_tilde; ++i) {
    const Eigen::Index idx =
        (m_tilde == 1) ? 0 : (static_cast<Eigen::Index>(i) * (m - 1)) / (m_tilde - 1);
    z.col(i) = data.inputs.col(idx);
  }

  auto objective = [&](const Inputs& pts) { return fic_log_marginal(h, pts, data); };

  double value = objective(z);
  if (!std::isfinite(value)) {
    throw TrainingDiverged("select_inducing: initial FIC likelihood non-finite");
  }
  const int n_coords = 2 * m_tilde;

  for (int it = 0; it < opts.max_iters; ++it) {
    // central-difference gradient; coordinates are independent LML evals
    Eigen::VectorXd grad(n_coords);
    bool bad = false;
#pragma omp parallel for schedule(dynamic, 2)
    for (int cidx = 0; cidx < n_coords; ++cidx) {
      const int col = cidx / 2;
      const int row = cidx % 2;
      Inputs zp = z, zm = z;
      zp(row, col) += opts.fd_step;
      zm(row, col) -= opts.fd_step;
      double vp, vm;
      try {
        vp = objective(zp);
        vm = objective(zm);
      } catch (const std::exception&) {
        vp = vm = std::numeric_limits<double>::quiet_NaN();
      }
      grad(cidx) = (vp - vm) / (2.0 * opts.fd_step);
      if (!std::isfinite(grad(cidx))) {
        bad = true;
      }
    }
    if (bad || grad.norm() <= opts.tol) {
      break;
    }
    // backtracking step on the flattened coordinates
    double step = 1.0 / std::max(1.0, grad.norm());
    bool improved = false;
    for (int ls = 0; ls < 25; ++ls) {
      Inputs cand = z;
      for (int cidx = 0; cidx < n_coords; ++cidx) {
        cand(cidx % 2, cidx / 2) += step * grad(cidx);
      }
      double cand_value;
      try {
        cand_value = objective(cand);
      } catch (const std::exception&) {
        cand_value = -std::numeric_limits<double>::infinity();
      }
      if (cand_value > value) {
        z = cand;
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
  return InducingSet{z};
}

}  // namespace platoon::gp
