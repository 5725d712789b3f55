#pragma once
// Deterministic random sampling. All mappings from raw 64-bit draws to
// doubles are spelled out here (no std distributions) so that a given seed
// produces identical streams on every platform and standard library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "aglercert/numerics.hpp"

namespace agler {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniformly distributed point on the unit circle.
  cplx unit_phase() {
    const double angle = two_pi() * uniform();
    return cplx(std::cos(angle), std::sin(angle));
  }

  // Uniformly distributed point in the closed disk of the given radius.
  cplx disk(double radius) { return radius * std::sqrt(uniform()) * unit_phase(); }

  std::vector<cplx> torus_point(int d) {
    std::vector<cplx> z(d);
    for (int j = 0; j < d; ++j) z[j] = unit_phase();
    return z;
  }

  std::vector<cplx> polydisk_point(int d) {
    std::vector<cplx> z(d);
    for (int j = 0; j < d; ++j) z[j] = disk(1.0);
    return z;
  }

  static constexpr double two_pi() { return 6.283185307179586476925286766559; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace agler
