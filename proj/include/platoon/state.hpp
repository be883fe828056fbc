#ifndef PLATOON_STATE_HPP
#define PLATOON_STATE_HPP

#include <Eigen/Dense>

#include "platoon/arx.hpp"

namespace platoon::sim {

/// Measured platoon state at the current step. Index 0 is the leader AV; the
/// HV follows the last AV. AV states are exact (no measurement noise). The
/// velocity history is the HV's nominal ARX chain, newest first.
struct PlatoonState {
  Eigen::VectorXd av_pos;  // m
  Eigen::VectorXd av_vel;  // m/s
  double hv_pos = 0.0;
  hv::VelocityHistory hv_history;
  double hv_vel = 0.0;  // realized HV velocity from the previous plant step
  int k = 0;

  int n_av() const { return static_cast<int>(av_pos.size()); }
};

/// Gaussian belief over the HV position.
struct HvBelief {
  double mean = 0.0;  // m
  double var = 0.0;   // m^2
};

}  // namespace platoon::sim

#endif
