#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>

namespace platoon::sim {

HvStepResult hv_plant_step(const hv::HvModel& model, const hv::VelocityHistory& history,
                           double hv_pos, double dt, Rng& rng) {
  HvStepResult r;
  r.nominal_vel = hv::arx_step(model.arx, history);
  gp::Prediction d{0.0, 0.0};
  if (model.discrepancy) {
    d = model.discrepancy->predict(gp::Input{history.hv[0], history.lead[0]});
  }
  r.realized_vel = r.nominal_vel + d.mean + std::sqrt(std::max(d.variance, 0.0)) * rng.gaussian();
  r.new_pos = hv_pos + dt * r.realized_vel;
  return r;
}

double TrajectoryLog::min_hv_gap() const {
  double m = std::numeric_limits<double>::infinity();
  for (const LogRow& r : rows) {
    m = std::min(m, r.dist_av_hv);
  }
  return m;
}

std::vector<double> TrajectoryLog::final_positions() const {
  std::vector<double> out;
  if (rows.empty()) {
    return out;
  }
  const LogRow& r = rows.back();
  out = r.av_pos;
  out.push_back(r.hv_pos);
  return out;
}

double ScenarioConfig::v_ref_at(double t) const {
  double v = 0.0;
  for (const auto& [start, value] : v_ref_schedule) {
    if (t >= start) {
      v = value;
    }
  }
  return v;
}

PlatoonState initial_state(const ScenarioConfig& cfg) {
  PlatoonState s;
  s.av_pos.resize(cfg.n_av);
  s.av_vel = Eigen::VectorXd::Zero(cfg.n_av);
  for (int i = 0; i < cfg.n_av; ++i) {
    s.av_pos(i) = -cfg.init_spacing * i;
  }
  s.hv_pos = -cfg.init_spacing * cfg.n_av;
  s.hv_history = {};
  s.hv_vel = 0.0;
  s.k = 0;
  return s;
}

TrajectoryLog run_scenario(const ScenarioConfig& cfg, mpc::Controller& controller,
                           const hv::HvModel& plant, std::uint64_t seed) {
  const int steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
  PlatoonState state = initial_state(cfg);
  Rng rng(seed);

  TrajectoryLog log;
  log.n_av = cfg.n_av;
  log.dt = cfg.dt;
  log.rows.reserve(static_cast<std::size_t>(steps));

  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;
    state.k = k;

    mpc::Controller::StepResult ctrl;
    try {
      ctrl = controller.step(state, cfg.v_ref_at(t));
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(e.what()) + " at step " + std::to_string(k), k);
    }

    const double lead_vel_k = state.av_vel(cfg.n_av - 1);
    const HvStepResult hv = hv_plant_step(plant, state.hv_history, state.hv_pos, cfg.dt, rng);

    LogRow row;
    row.t = t;
    row.av_pos.assign(state.av_pos.data(), state.av_pos.data() + cfg.n_av);
    row.av_vel.assign(state.av_vel.data(), state.av_vel.data() + cfg.n_av);
    row.av_accel.assign(ctrl.accel.data(), ctrl.accel.data() + cfg.n_av);
    row.hv_pos = state.hv_pos;
    row.hv_vel = hv.realized_vel;
    row.hv_mu = ctrl.solution.hv_pos_mean(1);
    row.hv_var = ctrl.solution.hv_pos_var(1);
    row.dist_av_hv = state.av_pos(cfg.n_av - 1) - state.hv_pos;
    row.bound = ctrl.solution.bound.front();
    row.solve_time = ctrl.wall_time;
    log.rows.push_back(std::move(row));

    for (int na = 0; na < cfg.n_av; ++na) {
      const auto [v, p] = av_step(state.av_vel(na), state.av_pos(na), ctrl.accel(na), cfg.dt);
      state.av_vel(na) = v;
      state.av_pos(na) = p;
    }
    state.hv_pos = hv.new_pos;
    state.hv_vel = hv.realized_vel;
    state.hv_history.push(hv.nominal_vel, lead_vel_k);
  }
  return log;
}

}  // namespace platoon::sim
