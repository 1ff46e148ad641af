#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace epiquad {

// splitmix64 step, used to derive decorrelated per-item seeds from a master
// seed. Deterministic across platforms, unlike distribution adapters.
inline std::uint64_t mix_seed(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Thin RNG wrapper giving reproducible uniforms and gaussians from a
// mt19937_64 stream. std::normal_distribution is implementation-defined, so
// gaussians use an explicit Box-Muller transform instead: same seed, same
// scene, on every standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Substream `index` of a master seed; substreams are independent for all
  // practical purposes, and inserting a point into a scene does not perturb
  // the noise of the others.
  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(mix_seed(master ^ mix_seed(index)));
  }

  // Uniform on [0, 1).
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double sigma) { return sigma * gaussian(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace epiquad
