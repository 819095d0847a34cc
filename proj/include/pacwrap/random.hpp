#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pacwrap {

// Deterministic random source used by every generator and Monte Carlo loop.
//
// Engine: std::mt19937_64 (bit-exact across standard libraries), seeded with
// splitmix64(seed, stream) so each trial or split gets an independent stream
// that does not depend on execution order. Uniforms take the top 53 bits;
// bounded integers use rejection; Gaussians use Box-Muller. None of the
// implementation-defined <random> distributions are used.
class Rng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64 seeded by splitmix64(seed, stream); box-muller normals";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(derive(seed, stream)) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pacwrap
