// Independent reference implementations used only by tests. These stay
// deliberately naive (Gauss-Jordan, series expansions, exhaustive search) so
// they share no code path with the library.

#ifndef PLATOON_TESTS_ORACLES_HPP
#define PLATOON_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "platoon/rng.hpp"

namespace oracles {

// explicit inverse by Gauss-Jordan elimination with partial pivoting
inline Eigen::MatrixXd gauss_jordan_inverse(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
        pivot = r;
      }
    }
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r != col && a(r, col) != 0.0) {
        const double f = a(r, col);
        a.row(r) -= f * a.row(col);
        inv.row(r) -= f * inv.row(col);
      }
    }
  }
  return inv;
}

// erf by Taylor series, accurate to ~1e-15 for |x| <= 4
inline double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) {
      break;
    }
  }
  return sum * 2.0 / std::sqrt(M_PI);
}

inline double cdf_oracle(double z) { return 0.5 * (1.0 + erf_series(z / std::sqrt(2.0))); }

// inverse CDF by bisection against the series CDF
inline double inv_cdf_bisect(double p) {
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf_oracle(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// random SPD matrix with eigenvalues in [lo_eig, hi_eig]
inline Eigen::MatrixXd random_spd(Eigen::Index n, platoon::Rng& rng, double lo_eig = 0.1,
                                  double hi_eig = 10.0) {
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = rng.gaussian();
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd eig(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    eig(i) = lo_eig + (hi_eig - lo_eig) * rng.uniform();
  }
  return q * eig.asDiagonal() * q.transpose();
}

// plain Lloyd's k-means on 2-D points
inline Eigen::Matrix2Xd kmeans_2d(const Eigen::Matrix2Xd& pts, int k, platoon::Rng& rng,
                                  int iters = 50) {
  Eigen::Matrix2Xd centers(2, k);
  for (int c = 0; c < k; ++c) {
    centers.col(c) = pts.col(static_cast<Eigen::Index>(rng.integer() %
                                                       static_cast<std::uint64_t>(pts.cols())));
  }
  std::vector<int> assign(static_cast<std::size_t>(pts.cols()));
  for (int it = 0; it < iters; ++it) {
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      int best = 0;
      double bd = 1e300;
      for (int c = 0; c < k; ++c) {
        const double d = (pts.col(i) - centers.col(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(i)] = best;
    }
    for (int c = 0; c < k; ++c) {
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      int count = 0;
      for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        if (assign[static_cast<std::size_t>(i)] == c) {
          sum += pts.col(i);
          ++count;
        }
      }
      if (count > 0) {
        centers.col(c) = sum / count;
      }
    }
  }
  return centers;
}

// QP oracle: enumerate active subsets of `A x >= lb`, solve the KKT system,
// return the best feasible candidate with nonnegative multipliers
struct QpOracleResult {
  Eigen::VectorXd x;
  double objective = 0.0;
};

inline std::optional<QpOracleResult> qp_brute_force(const Eigen::MatrixXd& h,
                                                    const Eigen::VectorXd& g,
                                                    const Eigen::MatrixXd& a,
                                                    const Eigen::VectorXd& lb) {
  const Eigen::Index n = g.size();
  const Eigen::Index m = lb.size();
  std::optional<QpOracleResult> best;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        act.push_back(i);
      }
    }
    if (static_cast<Eigen::Index>(act.size()) > n) {
      continue;
    }
    const Eigen::Index q = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd kkt(n + q, n + q);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = h;
    Eigen::VectorXd rhs(n + q);
    rhs.head(n) = -g;
    for (Eigen::Index j = 0; j < q; ++j) {
      kkt.block(n + j, 0, 1, n) = a.row(act[static_cast<std::size_t>(j)]);
      kkt.block(0, n + j, n, 1) = -a.row(act[static_cast<std::size_t>(j)]).transpose();
      rhs(n + j) = lb(act[static_cast<std::size_t>(j)]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) {
      continue;
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    const Eigen::VectorXd u = sol.tail(q);
    if ((u.array() < -1e-9).any()) {
      continue;
    }
    if (((a * x - lb).array() < -1e-8).any()) {
      continue;
    }
    const double obj = 0.5 * x.dot(h * x) + g.dot(x);
    if (!best || obj < best->objective - 1e-12) {
      best = QpOracleResult{x, obj};
    }
  }
  return best;
}

}  // namespace oracles

#endif
