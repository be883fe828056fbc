#ifndef PLATOON_MPC_HPP
#define PLATOON_MPC_HPP

#include <memory>
#include <optional>
#include <vector>

#include "platoon/gp.hpp"
#include "platoon/qp.hpp"
#include "platoon/state.hpp"

namespace platoon::mpc {

enum class Mode { kNominal, kGp };

struct Config {
  int horizon = 6;
  double q1 = 5.0;
  double q2 = 5.0;
  double r = 20.0;
  double dt = 0.25;        // s
  double delta = 20.0;     // m, hard inter-vehicle distance
  double delta_ext = 0.0;  // m, extra margin in the tightened bound
  double p_def = 0.95;     // chance-constraint satisfaction probability
  double v_min = -35.0, v_max = 35.0;
  double a_min = -5.0, a_max = 5.0;
  Mode mode = Mode::kGp;
  bool warm_start = true;

  void validate() const;
};

/// Tightened minimum gap for a given HV position variance:
/// delta + delta_ext + Phi^-1(p_def) * sqrt(sigma_p_sq).
double tighten_distance(double sigma_p_sq, const Config& cfg);

/// GP discrepancy mean/variance held constant over the horizon during one
/// solve; entry i feeds the propagation from step i to i+1.
struct TrajectoryCache {
  std::vector<gp::Prediction> entries;
};

struct Solution {
  Eigen::MatrixXd accel;        // n_av x N
  Eigen::MatrixXd av_vel;       // n_av x (N+1), column 0 measured
  Eigen::MatrixXd av_pos;       // n_av x (N+1)
  Eigen::VectorXd hv_vel;       // N+1, nominal ARX chain over the horizon
  Eigen::VectorXd hv_pos_mean;  // N+1
  Eigen::VectorXd hv_pos_var;   // N+1, non-decreasing
  std::vector<double> bound;    // enforced HV gap bound at steps 1..N
  double objective = 0.0;
  bool slacked = false;
  double max_violation = 0.0;
  std::vector<int> active_set;
};

/// Receding-horizon controller over stacked AV accelerations. One instance
/// per closed loop: it keeps the previous solution for the GP trajectory
/// cache and solver warm starts.
class Controller {
 public:
  Controller(Config cfg, hv::ArxCoefficients arx,
             std::shared_ptr<const gp::DiscrepancyPredictor> discrepancy = nullptr);

  struct StepResult {
    Eigen::VectorXd accel;  // first-step acceleration per AV
    Solution solution;
    double wall_time = 0.0;  // s, cache build + QP
  };

  StepResult step(const sim::PlatoonState& state, double v_ref);

  TrajectoryCache build_cache(const sim::PlatoonState& state) const;
  qp::Problem build_qp(const sim::PlatoonState& state, const TrajectoryCache& cache,
                       double v_ref) const;

  const Config& config() const { return cfg_; }
  void reset() { prev_.reset(); }

 private:
  Solution assemble(const sim::PlatoonState& state, const TrajectoryCache& cache,
                    const qp::Problem& problem, const qp::Solution& qs) const;

  Config cfg_;
  hv::ArxCoefficients arx_;
  std::shared_ptr<const gp::DiscrepancyPredictor> pred_;
  std::optional<Solution> prev_;
};

}  // namespace platoon::mpc

#endif
