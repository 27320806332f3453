#pragma once

// Generators and oracles shared by the tests. Nothing here calls the code
// under test except for the types.

#include <cmath>
#include <complex>
#include <random>

#include "arlab/quadric.hpp"

namespace testsupport {

using arlab::Complex;
using arlab::Vec4c;

inline Complex random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

/// Random point of Q^3 (not on any particular M_t): w4 solved from the quadric.
inline Vec4c random_quadric_point(std::mt19937_64& rng, double scale = 1.0) {
  for (;;) {
    const Complex w1 = random_complex(rng, scale);
    const Complex w2 = random_complex(rng, scale);
    const Complex w3 = random_complex(rng, scale);
    if (std::abs(w3) < 0.05) continue;
    return {w1, w2, w3, (1.0 - w1 * w2) / w3};
  }
}

/// w2 w3 w4^2 + i w1 w2^2 w4, written out independently of the library.
inline Complex F3(const Vec4c& w) {
  const Complex I{0.0, 1.0};
  return w[1] * w[2] * w[3] * w[3] + I * w[0] * w[1] * w[1] * w[3];
}

inline double half_norm_sum(const Vec4c& w) {
  double s = 0.0;
  for (const auto& c : w) s += std::norm(c);
  return s / 2.0;
}

}  // namespace testsupport
