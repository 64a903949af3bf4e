#ifndef BMIMAP_RNG_HPP
#define BMIMAP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "bmimap/specfun.hpp"

namespace bmimap {

// Reproducible generator. The engine (mt19937_64) and every variate
// recipe below are fixed by this header, not by the standard library's
// unspecified distribution implementations, so identical seeds give
// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); zeros are redrawn.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  // Standard normal by cdf inversion.
  double normal() { return specfun::std_normal_quantile(uniform_open()); }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape<1 boosted through
  // Gamma(shape+1) * U^(1/shape).
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape <= 0");
    if (shape < 1.0) {
      const double u = uniform_open();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_open();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
        return d * v;
    }
  }

  double beta(double a, double b) {
    for (;;) {
      const double x = gamma(a);
      const double y = gamma(b);
      if (x + y > 0.0) return x / (x + y);
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

// Stable per-record seed derivation (splitmix-style mixing over the
// master seed and a string key), so row results do not depend on batch
// order or filtering.
std::uint64_t derive_seed(std::uint64_t master, const std::string& key);

}  // namespace bmimap

#endif
