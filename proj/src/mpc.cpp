#include "platoon/mpc.hpp"

#include <chrono>
#include <cmath>

#include "platoon/linalg.hpp"

namespace platoon::mpc {

void Config::validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc: horizon must be >= 1");
  if (!(q1 > 0.0 && q2 > 0.0 && r > 0.0)) throw std::invalid_argument("mpc: weights must be > 0");
  if (!(p_def > 0.5 && p_def < 1.0)) throw std::invalid_argument("mpc: p_def must be in (0.5, 1)");
  if (!(delta > 0.0) || delta_ext < 0.0) throw std::invalid_argument("mpc: bad distance bounds");
  if (!(a_min < a_max) || !(v_min < v_max)) throw std::invalid_argument("mpc: bad box bounds");
  if (!(dt > 0.0)) throw std::invalid_argument("mpc: dt must be > 0");
}

double tighten_distance(double sigma_p_sq, const Config& cfg) {
  if (sigma_p_sq < 0.0) {
    throw std::domain_error("tighten_distance: negative variance");
  }
  return cfg.delta + cfg.delta_ext +
         linalg::normal_inv_cdf(cfg.p_def) * std::sqrt(sigma_p_sq);
}

namespace {

/// Scalar affine form w^T x + c over the stacked acceleration vector.
struct Affine {
  Eigen::VectorXd w;
  double c = 0.0;

  static Affine constant(Eigen::Index n, double value) {
    return {Eigen::VectorXd::Zero(n), value};
  }
  Affine operator+(const Affine& o) const { return {w + o.w, c + o.c}; }
  Affine operator-(const Affine& o) const { return {w - o.w, c - o.c}; }
  Affine scaled(double s) const { return {s * w, s * c}; }
  Affine plus_var(Eigen::Index idx, double coeff) const {
    Affine r = *this;
    r.w(idx) += coeff;
    return r;
  }
};

struct HorizonExprs {
  // [na][i], i = 0..N
  std::vector<std::vector<Affine>> vel, pos;
  std::vector<Affine> hv_vel;   // i = 0..N
  std::vector<Affine> hv_mean;  // i = 0..N
  std::vector<double> hv_var;   // i = 0..N
};

HorizonExprs build_horizon(const Config& cfg, const hv::ArxCoefficients& arx,
                           const sim::PlatoonState& state, const TrajectoryCache& cache) {
  const int n_av = state.n_av();
  const int horizon = cfg.horizon;
  const Eigen::Index n = static_cast<Eigen::Index>(n_av) * horizon;
  const double dt = cfg.dt;
  const bool gp = cfg.mode == Mode::kGp;

  auto var_index = [&](int na, int j) { return static_cast<Eigen::Index>(na) * horizon + j; };

  HorizonExprs e;
  e.vel.assign(n_av, {});
  e.pos.assign(n_av, {});
  for (int na = 0; na < n_av; ++na) {
    e.vel[na].reserve(horizon + 1);
    e.pos[na].reserve(horizon + 1);
    e.vel[na].push_back(Affine::constant(n, state.av_vel(na)));
    e.pos[na].push_back(Affine::constant(n, state.av_pos(na)));
    for (int i = 1; i <= horizon; ++i) {
      e.vel[na].push_back(e.vel[na][i - 1].plus_var(var_index(na, i - 1), dt));
      e.pos[na].push_back(e.pos[na][i - 1] + e.vel[na][i - 1].scaled(dt));
    }
  }

  // HV nominal chain: pre-horizon lags come from the measured history, the
  // lead-AV lags switch to decision-variable velocities once inside the
  // horizon.
  const int last = n_av - 1;
  e.hv_vel.reserve(horizon + 1);
  e.hv_vel.push_back(Affine::constant(n, hv::arx_step(arx, state.hv_history)));
  for (int i = 1; i <= horizon; ++i) {
    Affine acc = Affine::constant(n, 0.0);
    for (int l = 1; l <= 4; ++l) {
      const int j = i - l;
      if (j >= 0) {
        acc = acc + e.hv_vel[j].scaled(-arx.c[l - 1]);
      } else {
        acc.c += -arx.c[l - 1] * state.hv_history.hv[-j - 1];
      }
      if (j >= 1) {
        acc = acc + e.vel[last][j].scaled(arx.b[l - 1]);
      } else if (j == 0) {
        acc.c += arx.b[l - 1] * state.av_vel(last);
      } else {
        acc.c += arx.b[l - 1] * state.hv_history.lead[-j - 1];
      }
    }
    e.hv_vel.push_back(acc);
  }

  e.hv_mean.reserve(horizon + 1);
  e.hv_var.assign(horizon + 1, 0.0);
  e.hv_mean.push_back(Affine::constant(n, state.hv_pos));
  for (int i = 0; i < horizon; ++i) {
    Affine next = e.hv_mean[i] + e.hv_vel[i].scaled(dt);
    double var_next = e.hv_var[i];
    if (gp) {
      next.c += dt * cache.entries[static_cast<std::size_t>(i)].mean;
      var_next += dt * dt * cache.entries[static_cast<std::size_t>(i)].variance;
    }
    e.hv_mean.push_back(next);
    e.hv_var[i + 1] = var_next;
  }
  return e;
}

}  // namespace

Controller::Controller(Config cfg, hv::ArxCoefficients arx,
                       std::shared_ptr<const gp::DiscrepancyPredictor> discrepancy)
    : cfg_(cfg), arx_(arx), pred_(std::move(discrepancy)) {
  cfg_.validate();
  arx_.validate();
  if (cfg_.mode == Mode::kGp && !pred_) {
    throw std::invalid_argument("mpc: gp mode needs a discrepancy predictor");
  }
}

TrajectoryCache Controller::build_cache(const sim::PlatoonState& state) const {
  TrajectoryCache cache;
  if (cfg_.mode != Mode::kGp) {
    return cache;
  }
  const int horizon = cfg_.horizon;
  const int last = state.n_av() - 1;
  cache.entries.resize(static_cast<std::size_t>(horizon));
  const gp::Input measured{state.hv_history.hv[0], state.hv_history.lead[0]};
  for (int j = 0; j < horizon; ++j) {
    gp::Input in = measured;
    if (j >= 1 && prev_) {
      // receding-horizon shift: step j-1 of this solve lines up with step j
      // of the previous solution
      in = gp::Input{prev_->hv_vel(j), prev_->av_vel(last, j)};
    }
    cache.entries[static_cast<std::size_t>(j)] = pred_->predict(in);
  }
  return cache;
}

qp::Problem Controller::build_qp(const sim::PlatoonState& state, const TrajectoryCache& cache,
                                 double v_ref) const {
  const int n_av = state.n_av();
  const int horizon = cfg_.horizon;
  const Eigen::Index n = static_cast<Eigen::Index>(n_av) * horizon;
  const bool gp = cfg_.mode == Mode::kGp;

  const HorizonExprs e = build_horizon(cfg_, arx_, state, cache);

  qp::Problem p;
  p.hessian = Eigen::MatrixXd::Zero(n, n);
  p.linear = Eigen::VectorXd::Zero(n);
  p.hessian.diagonal().setConstant(2.0 * cfg_.r);

  auto add_quadratic = [&](double weight, const Affine& expr) {
    p.hessian += 2.0 * weight * expr.w * expr.w.transpose();
    p.linear += 2.0 * weight * expr.c * expr.w;
  };
  for (int i = 1; i <= horizon; ++i) {
    Affine err = e.vel[0][i];
    err.c -= v_ref;
    add_quadratic(cfg_.q1, err);
    for (int na = 1; na < n_av; ++na) {
      add_quadratic(cfg_.q2, e.vel[na][i] - e.vel[na - 1][i]);
    }
  }

  const Eigen::Index rows = 2 * n + 2 * static_cast<Eigen::Index>(n_av) * horizon +
                            static_cast<Eigen::Index>(n_av - 1) * horizon + horizon;
  p.constraints = Eigen::MatrixXd::Zero(rows, n);
  p.lower = Eigen::VectorXd::Zero(rows);
  Eigen::Index row = 0;
  auto add_row = [&](const Eigen::VectorXd& w, double lb, bool soft = false) {
    p.constraints.row(row) = w.transpose();
    p.lower(row) = lb;
    if (soft) {
      p.soft_rows.push_back(static_cast<int>(row));
    }
    ++row;
  };

  for (Eigen::Index idx = 0; idx < n; ++idx) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    w(idx) = 1.0;
    add_row(w, cfg_.a_min);
    add_row(-w, -cfg_.a_max);
  }
  for (int na = 0; na < n_av; ++na) {
    for (int i = 1; i <= horizon; ++i) {
      add_row(e.vel[na][i].w, cfg_.v_min - e.vel[na][i].c);
      add_row(-e.vel[na][i].w, e.vel[na][i].c - cfg_.v_max);
    }
  }
  for (int na = 1; na < n_av; ++na) {
    for (int i = 1; i <= horizon; ++i) {
      const Affine gap = e.pos[na - 1][i] - e.pos[na][i];
      add_row(gap.w, cfg_.delta - gap.c, true);
    }
  }
  for (int i = 1; i <= horizon; ++i) {
    const Affine gap = e.pos[n_av - 1][i] - e.hv_mean[i];
    const double bound = gp ? tighten_distance(e.hv_var[i], cfg_) : cfg_.delta;
    add_row(gap.w, bound - gap.c, true);
  }
  return p;
}

Solution Controller::assemble(const sim::PlatoonState& state, const TrajectoryCache& cache,
                              const qp::Problem& problem, const qp::Solution& qs) const {
  const int n_av = state.n_av();
  const int horizon = cfg_.horizon;
  const bool gp = cfg_.mode == Mode::kGp;
  const HorizonExprs e = build_horizon(cfg_, arx_, state, cache);

  Solution s;
  s.accel.resize(n_av, horizon);
  for (int na = 0; na < n_av; ++na) {
    for (int j = 0; j < horizon; ++j) {
      s.accel(na, j) = qs.x(static_cast<Eigen::Index>(na) * horizon + j);
    }
  }
  s.av_vel.resize(n_av, horizon + 1);
  s.av_pos.resize(n_av, horizon + 1);
  s.hv_vel.resize(horizon + 1);
  s.hv_pos_mean.resize(horizon + 1);
  s.hv_pos_var.resize(horizon + 1);
  for (int i = 0; i <= horizon; ++i) {
    for (int na = 0; na < n_av; ++na) {
      s.av_vel(na, i) = e.vel[na][i].w.dot(qs.x) + e.vel[na][i].c;
      s.av_pos(na, i) = e.pos[na][i].w.dot(qs.x) + e.pos[na][i].c;
    }
    s.hv_vel(i) = e.hv_vel[i].w.dot(qs.x) + e.hv_vel[i].c;
    s.hv_pos_mean(i) = e.hv_mean[i].w.dot(qs.x) + e.hv_mean[i].c;
    s.hv_pos_var(i) = e.hv_var[i];
  }
  s.bound.resize(static_cast<std::size_t>(horizon));
  for (int i = 1; i <= horizon; ++i) {
    s.bound[static_cast<std::size_t>(i - 1)] =
        gp ? tighten_distance(e.hv_var[i], cfg_) : cfg_.delta;
  }
  s.objective = qs.objective;
  s.slacked = qs.slacked;
  s.max_violation = qs.max_violation;
  s.active_set = qs.active;
  (void)problem;
  return s;
}

Controller::StepResult Controller::step(const sim::PlatoonState& state, double v_ref) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrajectoryCache cache = build_cache(state);
  const qp::Problem problem = build_qp(state, cache, v_ref);
  qp::SolverOptions opts;
  if (cfg_.warm_start && prev_) {
    opts.warm_active = prev_->active_set;
  }
  const qp::Solution qs = qp::solve(problem, opts);
  const auto t1 = std::chrono::steady_clock::now();

  StepResult res;
  res.solution = assemble(state, cache, problem, qs);
  res.accel = res.solution.accel.col(0);
  res.wall_time = std::chrono::duration<double>(t1 - t0).count();
  prev_ = res.solution;
  return res;
}

}  // namespace platoon::mpc
