#ifndef PLATOON_LINALG_HPP
#define PLATOON_LINALG_HPP

#include <Eigen/Dense>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon::linalg {

/// Symmetric matrix wrapper. Construction enforces symmetry (1e-12 relative)
/// and finiteness, so downstream factorizations can assume a valid input.
struct SymMatrix {
  Eigen::MatrixXd m;

  explicit SymMatrix(Eigen::MatrixXd mat);
  Eigen::Index size() const { return m.rows(); }
};

/// Lower-triangular Cholesky factor together with the diagonal jitter that
/// was actually added to make the factorization succeed.
struct CholFactor {
  Eigen::MatrixXd L;
  double jitter = 0.0;

  Eigen::Index size() const { return L.rows(); }
  double log_det_half() const;  // sum_i log L_ii
};

inline const std::vector<double>& default_jitter_schedule() {
  static const std::vector<double> schedule{0.0, 1e-10, 1e-8, 1e-6};
  return schedule;
}

/// Factor m + jitter*I using the smallest jitter in the schedule that yields
/// a positive-definite factorization. Throws NotPositiveDefinite when the
/// whole schedule fails (bad hyperparameters or duplicated inputs).
CholFactor cholesky(const SymMatrix& m,
                    const std::vector<double>& jitter_schedule = default_jitter_schedule());

/// Solve (L L^T) x = b.
Eigen::VectorXd chol_solve(const CholFactor& f, const Eigen::VectorXd& b);

/// Standard normal CDF, Phi(z).
double normal_cdf(double z);

/// Inverse standard normal CDF. Rational approximation refined with one
/// Newton step against the erfc-based CDF; |Phi(z) - p| <= 1e-10.
/// Throws std::domain_error for p outside (0,1).
double normal_inv_cdf(double p);

}  // namespace platoon::linalg

#endif
