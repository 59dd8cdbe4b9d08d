#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Splittable pseudo-random streams built on SplitMix64. A stream is derived
// from (seed, replication, role), so parallel Monte Carlo replications draw
// from independent deterministic streams regardless of scheduling.

namespace ftreg::rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

enum class Role : std::uint64_t {
  truth_core = 0,
  truth_factor = 1,
  kl_scores = 2,
  obs_noise = 3,
  response_noise = 4,
  folds = 5,
  generic = 6,
};

class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  static Stream derive(std::uint64_t seed, std::uint64_t replication, Role role) {
    std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ULL);
    s = mix64(s ^ (0xD1B54A32D192ED03ULL * (replication + 1)));
    s = mix64(s ^ (0x8CB92BA72F3D8DD7ULL * (static_cast<std::uint64_t>(role) + 1)));
    return Stream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ftreg::rng
