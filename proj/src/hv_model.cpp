#include "platoon/hv_model.hpp"

#include <cmath>

namespace platoon::hv {

gp::Prediction combined_predict(const HvModel& m, const VelocityHistory& h) {
  const double nominal = arx_step(m.arx, h);
  if (!m.discrepancy) {
    return {nominal, 0.0};
  }
  const gp::Prediction d = m.discrepancy->predict(gp::Input{h.hv[0], h.lead[0]});
  return {nominal + d.mean, d.variance};
}

namespace {

VelocityHistory history_at(std::span<const double> hv, std::span<const double> lead,
                           std::size_t k) {
  VelocityHistory h;
  for (int i = 0; i < 4; ++i) {
    h.hv[i] = hv[k - 1 - static_cast<std::size_t>(i)];
    h.lead[i] = lead[k - 1 - static_cast<std::size_t>(i)];
  }
  return h;
}

}  // namespace

std::vector<double> arx_free_run(std::span<const double> hv_measured,
                                 std::span<const double> lead, const ArxCoefficients& c) {
  if (hv_measured.size() != lead.size()) {
    throw DimensionMismatch("arx_free_run: series lengths differ");
  }
  if (hv_measured.size() < 5) {
    throw SeriesTooShort("arx_free_run: need at least 5 samples");
  }
  std::vector<double> run(hv_measured.size());
  for (std::size_t k = 0; k < 4; ++k) {
    run[k] = hv_measured[k];
  }
  for (std::size_t k = 4; k < run.size(); ++k) {
    run[k] = arx_step(c, history_at(run, lead, k));
  }
  return run;
}

gp::Dataset build_discrepancy_dataset(std::span<const double> hv_measured,
                                      std::span<const double> lead,
                                      const ArxCoefficients& c) {
  const std::vector<double> run = arx_free_run(hv_measured, lead, c);
  const std::size_t n = run.size() - 4;  // one sample per predicted step
  gp::Inputs inputs(2, static_cast<Eigen::Index>(n));
  Eigen::VectorXd targets(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = j + 4;
    inputs.col(static_cast<Eigen::Index>(j)) << run[k - 1], lead[k - 1];
    targets(static_cast<Eigen::Index>(j)) = hv_measured[k] - run[k];
  }
  return gp::Dataset(std::move(inputs), std::move(targets));
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw DimensionMismatch("rmse: series lengths differ");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("rmse: empty series");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

RolloutEval evaluate_rollout(const HvModel& m, std::span<const double> hv_measured,
                             std::span<const double> lead) {
  RolloutEval out;
  out.arx_prediction = arx_free_run(hv_measured, lead, m.arx);
  out.corrected_prediction = out.arx_prediction;
  if (m.discrepancy) {
    for (std::size_t k = 4; k < out.arx_prediction.size(); ++k) {
      const gp::Prediction d = m.discrepancy->predict(
          gp::Input{out.arx_prediction[k - 1], lead[k - 1]});
      out.corrected_prediction[k] = out.arx_prediction[k] + d.mean;
    }
  }
  const std::size_t n = hv_measured.size();
  std::span<const double> act(hv_measured.data() + 4, n - 4);
  out.arx_rmse = rmse({out.arx_prediction.data() + 4, n - 4}, act);
  out.corrected_rmse = rmse({out.corrected_prediction.data() + 4, n - 4}, act);
  return out;
}

}  // namespace platoon::hv
