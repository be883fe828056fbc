#ifndef PLATOON_ARX_HPP
#define PLATOON_ARX_HPP

#include <array>
#include <cmath>
#include <span>

#include "platoon/errors.hpp"

namespace platoon::hv {

/// Fourth-order difference-equation coefficients of the human driver's
/// velocity response:
///   v_k = -c1 v_{k-1} - ... - c4 v_{k-4} + b1 u_{k-1} + ... + b4 u_{k-4}
/// where u is the velocity of the AV directly ahead.
struct ArxCoefficients {
  std::array<double, 4> c{};
  std::array<double, 4> b{};

  /// Steady-state output/input ratio; ~1 for a velocity-tracking driver.
  double dc_gain() const {
    double sc = 0.0, sb = 0.0;
    for (int i = 0; i < 4; ++i) {
      sc += c[i];
      sb += b[i];
    }
    return sb / (1.0 + sc);
  }

  void validate() const {
    for (int i = 0; i < 4; ++i) {
      if (!std::isfinite(c[i]) || !std::isfinite(b[i])) {
        throw std::invalid_argument("ArxCoefficients: non-finite entry");
      }
    }
    const double g = dc_gain();
    if (!(g >= 0.9 && g <= 1.1)) {
      throw std::invalid_argument("ArxCoefficients: DC gain " + std::to_string(g) +
                                  " outside [0.9, 1.1]");
    }
  }

  /// Coefficients identified from driver-in-the-loop data at 4 Hz; used as
  /// the fixed nominal model throughout.
  static ArxCoefficients reference() {
    ArxCoefficients a;
    a.c = {-3.0227, 3.3543, -1.6329, 0.3014};
    a.b = {0.0063, -0.0303, 0.0495, -0.0254};
    return a;
  }
};

/// Last four HV and lead-AV velocities, newest first (index 0 = k-1).
struct VelocityHistory {
  std::array<double, 4> hv{};
  std::array<double, 4> lead{};

  /// Shift in the step-k values, dropping the oldest.
  void push(double hv_k, double lead_k) {
    for (int i = 3; i > 0; --i) {
      hv[i] = hv[i - 1];
      lead[i] = lead[i - 1];
    }
    hv[0] = hv_k;
    lead[0] = lead_k;
  }
};

inline double arx_step(const ArxCoefficients& a, const VelocityHistory& h) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    v += -a.c[i] * h.hv[i] + a.b[i] * h.lead[i];
  }
  return v;
}

}  // namespace platoon::hv

#endif
