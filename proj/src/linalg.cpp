#include "platoon/linalg.hpp"

#include <cmath>
#include <limits>

namespace platoon::linalg {

SymMatrix::SymMatrix(Eigen::MatrixXd mat) : m(std::move(mat)) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SymMatrix: matrix is not square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("SymMatrix: non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("SymMatrix: asymmetry exceeds 1e-12 relative");
  }
}

double CholFactor::log_det_half() const {
  return L.diagonal().array().log().sum();
}

CholFactor cholesky(const SymMatrix& m, const std::vector<double>& jitter_schedule) {
  const Eigen::Index n = m.size();
  for (double jitter : jitter_schedule) {
    Eigen::MatrixXd k = m.m;
    if (jitter > 0.0) {
      k.diagonal().array() += jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
      CholFactor f;
      f.L = llt.matrixL();
      f.jitter = jitter;
      // LLT can succeed numerically with a zero/denormal pivot; insist on a
      // strictly positive diagonal before accepting the factor.
      if ((f.L.diagonal().array() > 0.0).all()) {
        return f;
      }
    }
  }
  throw NotPositiveDefinite("cholesky: jitter schedule exhausted for size " +
                            std::to_string(n));
}

Eigen::VectorXd chol_solve(const CholFactor& f, const Eigen::VectorXd& b) {
  if (b.size() != f.size()) {
    throw DimensionMismatch("chol_solve: rhs size " + std::to_string(b.size()) +
                            " != factor size " + std::to_string(f.size()));
  }
  Eigen::VectorXd y = f.L.triangularView<Eigen::Lower>().solve(b);
  return f.L.transpose().triangularView<Eigen::Upper>().solve(y);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

namespace {

// Acklam's rational approximation to the lower-tail inverse normal CDF,
// |error| < 1.15e-9 before refinement.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_inv_cdf: p must be in (0,1)");
  }
  // Reduce to the lower tail so that antisymmetry holds by construction
  // whenever 1-p round-trips exactly (e.g. dyadic probabilities).
  const bool upper = p > 0.5;
  const double pl = upper ? 1.0 - p : p;
  double z = acklam(pl);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  if (pdf > 1e-280) {
    z -= (normal_cdf(z) - pl) / pdf;
  }
  return upper ? -z : z;
}

}  // namespace platoon::linalg
