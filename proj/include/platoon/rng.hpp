#ifndef PLATOON_RNG_HPP
#define PLATOON_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace platoon {

// Deterministic RNG wrapper. std::normal_distribution is implementation
// defined, so gaussians are drawn with an explicit Box-Muller transform to
// keep logs bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53-bit mantissa double in [0,1)
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t integer() { return engine_(); }

  // Independent stream for parallel work: draws keyed by index are
  // reproducible regardless of thread scheduling.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace platoon

#endif
