#ifndef PLATOON_SIM_HPP
#define PLATOON_SIM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "platoon/hv_model.hpp"
#include "platoon/mpc.hpp"
#include "platoon/rng.hpp"
#include "platoon/state.hpp"

namespace platoon::sim {

/// Explicit Euler with the position using the pre-update velocity.
inline std::pair<double, double> av_step(double v, double p, double a_cmd, double dt) {
  return {v + dt * a_cmd, p + dt * v};
}

/// One-step belief propagation; the covariance between position and velocity
/// is neglected.
inline HvBelief propagate_belief(const HvBelief& b, double hv_vel, const gp::Prediction& pred,
                                 double dt) {
  return {b.mean + dt * hv_vel + dt * pred.mean, b.var + dt * dt * pred.variance};
}

struct HvStepResult {
  double nominal_vel = 0.0;   // ARX chain value v^H_k
  double realized_vel = 0.0;  // nominal + GP draw, advances the position
  double new_pos = 0.0;
};

/// Advance the HV plant one step: the nominal ARX chain extends itself, the
/// realized velocity adds a draw from the discrepancy posterior at the lag-1
/// velocity pair, and the position integrates the realized velocity.
HvStepResult hv_plant_step(const hv::HvModel& model, const hv::VelocityHistory& history,
                           double hv_pos, double dt, Rng& rng);

struct LogRow {
  double t = 0.0;
  std::vector<double> av_pos, av_vel, av_accel;
  double hv_pos = 0.0;
  double hv_vel = 0.0;     // realized
  double hv_mu = 0.0;      // controller's one-step-ahead position mean
  double hv_var = 0.0;     // and variance
  double dist_av_hv = 0.0;
  double bound = 0.0;      // enforced gap bound at the first horizon step
  double solve_time = 0.0;
};

struct TrajectoryLog {
  int n_av = 0;
  double dt = 0.0;
  std::vector<LogRow> rows;
  std::vector<std::string> provenance;

  double min_hv_gap() const;
  std::vector<double> final_positions() const;  // AVs then HV
};

struct ScenarioConfig {
  int n_av = 2;
  double dt = 0.25;
  double duration = 80.0;      // s
  double init_spacing = 24.0;  // m between consecutive vehicles
  std::vector<std::pair<double, double>> v_ref_schedule{{0.0, 20.0}, {30.0, 10.0}};
  std::uint64_t seed = 1;

  double v_ref_at(double t) const;
};

PlatoonState initial_state(const ScenarioConfig& cfg);

/// Closed loop: the controller commands AV accelerations, the plant advances
/// AVs and the HV. Reproducible under a fixed seed. Solver failures carry the
/// step index.
TrajectoryLog run_scenario(const ScenarioConfig& cfg, mpc::Controller& controller,
                           const hv::HvModel& plant, std::uint64_t seed);

}  // namespace platoon::sim

#endif
