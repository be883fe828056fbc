#include "platoon/kernel.hpp"

namespace platoon::gp {

Eigen::MatrixXd gram_matrix_serial(const Inputs& a, const Hyperparams& h) {
  const Eigen::Index m = a.cols();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = h.signal_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = se_kernel(a.col(i), a.col(j), h);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd gram_matrix(const Inputs& a, const Hyperparams& h) {
  const Eigen::Index m = a.cols();
  Eigen::MatrixXd k(m, m);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = h.signal_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = se_kernel(a.col(i), a.col(j), h);
    }
  }
  // mirror the strict lower triangle
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::MatrixXd cross_covariance_serial(const Inputs& a, const Inputs& b, const Hyperparams& h) {
  Eigen::MatrixXd k(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      k(i, j) = se_kernel(a.col(i), b.col(j), h);
    }
  }
  return k;
}

Eigen::MatrixXd cross_covariance(const Inputs& a, const Inputs& b, const Hyperparams& h) {
  Eigen::MatrixXd k(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      k(i, j) = se_kernel(a.col(i), b.col(j), h);
    }
  }
  return k;
}

}  // namespace platoon::gp
