#ifndef PLATOON_QP_HPP
#define PLATOON_QP_HPP

#include <Eigen/Dense>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon::qp {

/// min 0.5 x^T H x + g^T x  s.t.  A x >= lb, with H symmetric positive
/// definite. Rows listed in soft_rows may be relaxed with L1-penalized
/// slacks when the problem is infeasible.
struct Problem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd constraints;  // m x n
  Eigen::VectorXd lower;        // m
  std::vector<int> soft_rows;

  Eigen::Index num_vars() const { return linear.size(); }
  Eigen::Index num_constraints() const { return lower.size(); }
};

struct Solution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per constraint row, >= 0
  std::vector<int> active;
  double objective = 0.0;
  bool slacked = false;
  double max_violation = 0.0;  // largest slack used when relaxed
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iters = 500;
  double slack_penalty = 1e6;
  std::vector<int> warm_active;  // rows to consider first when scanning
};

/// Dual active-set solve (Goldfarb-Idnani step logic with dense re-solves;
/// fine at the problem sizes here). Infeasible problems are re-solved with
/// slacks on the soft rows; if that also fails, throws SolverFailure.
Solution solve(const Problem& p, const SolverOptions& opts = {});

/// Max of stationarity, primal feasibility and complementarity residuals.
double kkt_residual(const Problem& p, const Solution& s);

}  // namespace platoon::qp

#endif
