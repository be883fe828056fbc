#include "platoon/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace platoon::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ActiveSetResult {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  std::vector<int> active;
  int iterations = 0;
  bool feasible = true;
};

ActiveSetResult dual_active_set(const Problem& p, const SolverOptions& opts) {
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = p.num_constraints();

  Eigen::LLT<Eigen::MatrixXd> llt(p.hessian);
  if (llt.info() != Eigen::Success) {
    throw SolverFailure("qp: Hessian is not positive definite");
  }

  ActiveSetResult res;
  res.x = llt.solve(-p.linear);
  res.u = Eigen::VectorXd::Zero(m);
  std::vector<int>& active = res.active;

  std::vector<char> in_active(static_cast<std::size_t>(m), 0);
  // scan order: warm-started rows first, then the rest
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(m));
  for (int r : opts.warm_active) {
    if (r >= 0 && r < m && !std::count(order.begin(), order.end(), r)) {
      order.push_back(r);
    }
  }
  for (int r = 0; r < m; ++r) {
    if (!std::count(order.begin(), order.end(), r)) {
      order.push_back(r);
    }
  }

  auto violation = [&](int row) {
    return p.constraints.row(row).dot(res.x) - p.lower(row);
  };

  for (int outer = 0; outer < opts.max_iters; ++outer) {
    res.iterations = outer;
    // most violated inactive constraint (warm rows win ties by order)
    int pick = -1;
    double worst = -opts.tol;
    for (int row : order) {
      if (in_active[static_cast<std::size_t>(row)]) continue;
      const double v = violation(row);
      if (v < worst) {
        worst = v;
        pick = row;
      }
    }
    if (pick < 0) {
      return res;  // optimal
    }

    const Eigen::VectorXd ap = p.constraints.row(pick).transpose();
    double u_incoming = 0.0;

    for (int inner = 0; inner <= static_cast<int>(n) + 1; ++inner) {
      const Eigen::Index q = static_cast<Eigen::Index>(active.size());
      const Eigen::VectorXd y = llt.solve(ap);

      Eigen::VectorXd z;
      Eigen::VectorXd r;
      if (q == 0) {
        z = y;
      } else {
        Eigen::MatrixXd nmat(n, q);
        for (Eigen::Index j = 0; j < q; ++j) {
          nmat.col(j) = p.constraints.row(active[static_cast<std::size_t>(j)]).transpose();
        }
        const Eigen::MatrixXd hinv_n = llt.solve(nmat);
        const Eigen::MatrixXd mred = nmat.transpose() * hinv_n;
        r = mred.ldlt().solve(nmat.transpose() * y);
        z = y - hinv_n * r;
      }

      const double ztap = z.dot(ap);
      const double sp = violation(pick);

      double t1 = kInf;
      int drop_idx = -1;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (r(j) > opts.tol) {
          const int row = active[static_cast<std::size_t>(j)];
          const double cand = res.u(row) / r(j);
          if (cand < t1) {
            t1 = cand;
            drop_idx = static_cast<int>(j);
          }
        }
      }
      const double t2 = (ztap > opts.tol) ? (-sp / ztap) : kInf;

      if (t1 == kInf && t2 == kInf) {
        res.feasible = false;  // constraint unreachable: primal infeasible
        return res;
      }
      const double t = std::min(t1, t2);

      if (t2 < kInf) {
        res.x += t * z;
      }
      for (Eigen::Index j = 0; j < q; ++j) {
        res.u(active[static_cast<std::size_t>(j)]) -= t * r(j);
      }
      u_incoming += t;

      if (t == t2) {
        active.push_back(pick);
        in_active[static_cast<std::size_t>(pick)] = 1;
        res.u(pick) = u_incoming;
        break;
      }
      // dual step: drop the blocking constraint and retry
      const int dropped = active[static_cast<std::size_t>(drop_idx)];
      res.u(dropped) = 0.0;
      in_active[static_cast<std::size_t>(dropped)] = 0;
      active.erase(active.begin() + drop_idx);
    }
  }
  throw SolverFailure("qp: active-set iteration limit reached");
}

Problem slacked_problem(const Problem& p, double penalty) {
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = p.num_constraints();
  const Eigen::Index ns = static_cast<Eigen::Index>(p.soft_rows.size());
  Problem s;
  s.hessian = Eigen::MatrixXd::Zero(n + ns, n + ns);
  s.hessian.topLeftCorner(n, n) = p.hessian;
  // small quadratic term keeps the extended Hessian positive definite; the
  // L1 penalty dominates the slack cost
  s.hessian.bottomRightCorner(ns, ns) = 1e-4 * Eigen::MatrixXd::Identity(ns, ns);
  s.linear = Eigen::VectorXd::Zero(n + ns);
  s.linear.head(n) = p.linear;
  s.linear.tail(ns).setConstant(penalty);
  s.constraints = Eigen::MatrixXd::Zero(m + ns, n + ns);
  s.constraints.topLeftCorner(m, n) = p.constraints;
  s.lower = Eigen::VectorXd::Zero(m + ns);
  s.lower.head(m) = p.lower;
  for (Eigen::Index j = 0; j < ns; ++j) {
    s.constraints(p.soft_rows[static_cast<std::size_t>(j)], n + j) = 1.0;  // a^T x + s >= lb
    s.constraints(m + j, n + j) = 1.0;                                     // s >= 0
  }
  return s;
}

}  // namespace

Solution solve(const Problem& p, const SolverOptions& opts) {
  if (p.hessian.rows() != p.num_vars() || p.constraints.rows() != p.num_constraints() ||
      (p.num_constraints() > 0 && p.constraints.cols() != p.num_vars())) {
    throw DimensionMismatch("qp: inconsistent problem dimensions");
  }

  ActiveSetResult r = dual_active_set(p, opts);
  Solution sol;
  if (r.feasible) {
    sol.x = r.x;
    sol.multipliers = r.u;
    sol.active = r.active;
    sol.iterations = r.iterations;
    sol.objective = 0.5 * sol.x.dot(p.hessian * sol.x) + p.linear.dot(sol.x);
    return sol;
  }

  if (p.soft_rows.empty()) {
    throw SolverFailure("qp: infeasible and no soft rows to relax");
  }
  const Problem relaxed = slacked_problem(p, opts.slack_penalty);
  SolverOptions ropts = opts;
  ropts.warm_active.clear();
  ActiveSetResult rs = dual_active_set(relaxed, ropts);
  if (!rs.feasible) {
    throw SolverFailure("qp: slack-relaxed problem still infeasible");
  }
  const Eigen::Index n = p.num_vars();
  sol.x = rs.x.head(n);
  sol.multipliers = rs.u.head(p.num_constraints());
  for (int a : rs.active) {
    if (a < p.num_constraints()) {
      sol.active.push_back(a);
    }
  }
  sol.iterations = rs.iterations;
  sol.slacked = true;
  sol.max_violation = rs.x.tail(static_cast<Eigen::Index>(p.soft_rows.size())).maxCoeff();
  sol.objective = 0.5 * sol.x.dot(p.hessian * sol.x) + p.linear.dot(sol.x);
  return sol;
}

double kkt_residual(const Problem& p, const Solution& s) {
  const Eigen::VectorXd stat =
      p.hessian * s.x + p.linear - p.constraints.transpose() * s.multipliers;
  double res = stat.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < p.num_constraints(); ++i) {
    const double slack = p.constraints.row(i).dot(s.x) - p.lower(i);
    res = std::max(res, -slack);                              // primal feasibility
    res = std::max(res, std::abs(s.multipliers(i) * slack));  // complementarity
    res = std::max(res, -s.multipliers(i));                   // dual feasibility
  }
  return res;
}

}  // namespace platoon::qp
