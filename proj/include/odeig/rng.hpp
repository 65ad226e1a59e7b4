#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace odeig {

// Deterministic random source. Distribution code is written out by hand
// (instead of using std::*_distribution) so that a given seed produces the
// same stream on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("uniform: lo must be <= hi");
    return lo + (hi - lo) * uniform01();
  }

  // Standard normal via Box-Muller, two uniforms per call.
  double normal() {
    double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, bound) by rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  std::vector<double> normal_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal();
    return v;
  }

  // Uniformly distributed direction on the unit sphere.
  std::vector<double> unit_vector(std::size_t n) {
    if (n == 0) throw std::invalid_argument("unit_vector: n must be positive");
    for (;;) {
      std::vector<double> v = normal_vector(n);
      double s = 0.0;
      for (double x : v) s += x * x;
      double nrm = std::sqrt(s);
      if (nrm > 1e-8) {
        for (auto& x : v) x /= nrm;
        return v;
      }
    }
  }

private:
  std::mt19937_64 gen_;
};

} // namespace odeig
