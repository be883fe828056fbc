#ifndef PLATOON_DATAGEN_HPP
#define PLATOON_DATAGEN_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "platoon/arx.hpp"

namespace platoon::datagen {

/// Continuous-time driver response: second-order transfer function with a
/// lead zero and a pure input delay, plus an output distortion and smooth
/// behavioral noise that the nominal ARX structure cannot express.
struct DriverResponseConfig {
  double gain = 1.0;        // K
  double zero_tc = 12.0;    // T_z (s)
  double damping = 0.8;     // gamma
  double natural_tc = 9.0;  // T_w (s)
  double delay = 0.75;      // T_d (s); rounded to whole steps when discretized
  double noise_std = 0.1;   // stationary std of the velocity noise (m/s)
  double noise_tau = 2.0;   // correlation time of the noise (s)
  double nonlin_amp = 0.3;  // amplitude of the sin(v/5) distortion (m/s)

  void validate() const;
};

/// Piecewise-constant lead-velocity schedule. Plateau values are drawn from
/// `plateau_levels` in a seeded random order; ramps respect `ramp_accel`.
struct ScenarioProfile {
  std::vector<double> plateau_levels{10.0, 15.0, 20.0};
  int plateau_count = 6;
  double plateau_duration = 20.0;  // s; >= 20 so steady states appear
  double ramp_accel = 1.0;         // m/s^2
  double dt = 0.25;                // s
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<double> generate_lead_profile(const ScenarioProfile& p);

/// Zero-order-hold discretization of the delayed response, integer-step
/// delay, then output distortion and AR(1)-filtered Gaussian noise. Output
/// clamped to [0, 35] m/s.
std::vector<double> simulate_ground_truth_driver(const DriverResponseConfig& cfg,
                                                 std::span<const double> lead, double dt,
                                                 std::uint64_t seed);

/// The ARX(4,4) difference equation equivalent to `cfg` at sample time `dt`:
/// second-order Pade approximation of the delay, then exact ZOH
/// discretization of the resulting fourth-order transfer function.
hv::ArxCoefficients derive_arx(const DriverResponseConfig& cfg, double dt);

/// Evenly strided subset: percent/100 of `count`, starting at index 0.
std::vector<std::size_t> stride_indices(std::size_t count, int percent);

struct CorpusOptions {
  int n_sets = 9;
  int train_sets = 6;
  int stride_percent = 20;
  std::uint64_t seed = 0;
  ScenarioProfile profile;
  DriverResponseConfig driver;
  std::vector<std::string> provenance;  // echoed into every output file
};

struct CorpusManifest {
  struct Entry {
    std::string file;
    std::string role;  // "train_source" or "test"
    std::uint64_t seed = 0;
    std::size_t samples = 0;
  };
  std::vector<Entry> entries;
  int stride = 5;
  int train_sets = 0;
};

/// Writes one CSV per set plus `manifest.txt`; returns the manifest.
CorpusManifest make_corpus(const CorpusOptions& opts, const std::filesystem::path& out_dir);

CorpusManifest read_manifest(const std::filesystem::path& manifest_path);

}  // namespace platoon::datagen

#endif
