#ifndef PLATOON_HV_MODEL_HPP
#define PLATOON_HV_MODEL_HPP

#include <memory>
#include <vector>

#include "platoon/arx.hpp"
#include "platoon/gp.hpp"

namespace platoon::hv {

/// ARX nominal model plus a GP discrepancy predictor (exact or sparse,
/// interchangeable).
struct HvModel {
  ArxCoefficients arx;
  std::shared_ptr<const gp::DiscrepancyPredictor> discrepancy;
};

/// Corrected one-step prediction: ARX mean shifted by the GP posterior at the
/// lag-1 velocity pair, variance from the GP.
gp::Prediction combined_predict(const HvModel& m, const VelocityHistory& h);

/// Free-run of the ARX recursion over a measured series: initialized from the
/// first four measured HV samples, then fed its own predictions while the
/// lead-velocity column stays measured. Returns one value per sample (the
/// first four equal the measurements).
std::vector<double> arx_free_run(std::span<const double> hv_measured,
                                 std::span<const double> lead,
                                 const ArxCoefficients& c);

/// Discrepancy dataset for GP training: targets are the gaps between the
/// measured HV velocity and the ARX free run, inputs are the lag-1
/// (free-run HV velocity, lead velocity) pairs. Needs at least 5 samples.
gp::Dataset build_discrepancy_dataset(std::span<const double> hv_measured,
                                      std::span<const double> lead,
                                      const ArxCoefficients& c);

double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Model-accuracy evaluation on a held-out series: the ARX free run alone vs
/// the free run corrected by the discrepancy model at each step.
struct RolloutEval {
  double arx_rmse = 0.0;
  double corrected_rmse = 0.0;
  std::vector<double> arx_prediction;        // free-run velocities
  std::vector<double> corrected_prediction;  // free run + GP mean
};

RolloutEval evaluate_rollout(const HvModel& m, std::span<const double> hv_measured,
                             std::span<const double> lead);

}  // namespace platoon::hv

#endif
