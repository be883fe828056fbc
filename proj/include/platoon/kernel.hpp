#ifndef PLATOON_KERNEL_HPP
#define PLATOON_KERNEL_HPP

#include <Eigen/Dense>

#include "platoon/errors.hpp"

namespace platoon::gp {

using Input = Eigen::Vector2d;   // (HV velocity, lead AV velocity) in m/s
using Inputs = Eigen::Matrix2Xd; // one column per point

/// Squared-exponential kernel hyperparameters. Values live in natural units;
/// the trainer works on their logs.
struct Hyperparams {
  double signal_var = 1.0;                      // sigma_f^2
  Eigen::Vector2d length_sq{1.0, 1.0};          // diagonal of L
  double noise_var = 0.1;                       // sigma^2

  void validate() const {
    if (!(signal_var > 0.0) || !(noise_var > 0.0) || !(length_sq.array() > 0.0).all()) {
      throw std::invalid_argument("Hyperparams: all entries must be strictly positive");
    }
  }
};

inline double se_kernel(const Input& x, const Input& y, const Hyperparams& h) {
  const Eigen::Vector2d diff = x - y;
  const double q = diff(0) * diff(0) / h.length_sq(0) + diff(1) * diff(1) / h.length_sq(1);
  return h.signal_var * std::exp(-0.5 * q);
}

// Gram/cross-covariance builders. The *_serial variants are the reference
// implementations; the default ones parallelize the row loop with OpenMP and
// must produce bitwise-identical results (each entry is independent).
Eigen::MatrixXd gram_matrix_serial(const Inputs& a, const Hyperparams& h);
Eigen::MatrixXd gram_matrix(const Inputs& a, const Hyperparams& h);
Eigen::MatrixXd cross_covariance_serial(const Inputs& a, const Inputs& b, const Hyperparams& h);
Eigen::MatrixXd cross_covariance(const Inputs& a, const Inputs& b, const Hyperparams& h);

}  // namespace platoon::gp

#endif
