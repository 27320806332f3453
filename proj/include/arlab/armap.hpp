#pragma once

// The Ahern-Rudin map f(z, w) = (z, w, w zb wb^2 + i z zb^2 wb), its
// holomorphic continuation F to C^4 and the Jacobian of F restricted to Q^3.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "arlab/quadric.hpp"

namespace arlab {

using MapValue = std::array<Complex, 3>;
using Jacobian34 = Eigen::Matrix<Complex, 3, 4>;

MapValue eval_f(Complex z, Complex w);

/// F(w1, w2, w3, w4) = (w1, w3, w2 w3 w4^2 + i w1 w2^2 w4), defined on all of C^4.
MapValue eval_F(const Vec4c& w);

Jacobian34 jacobian_F(const Vec4c& w);

/// Singular values of a 3x4 complex Jacobian, descending.
std::array<double, 3> singular_values(const Jacobian34& j);

/// Rank-3 test with the smallest singular value measured relative to the largest.
bool has_full_rank(const Jacobian34& j, double rel_threshold = 1e-8);

enum class Chart {
  PHI,  // local coordinates (w1, w3, w4); needs w1 != 0
  PSI,  // local coordinates (w1, w2, w3); needs w3 != 0
};

const char* to_string(Chart c);

struct ChartJacobian {
  Complex value;
  Chart chart = Chart::PHI;
};

/// (3i - 3) p^2 + (2 - 4i) p + i with p = w3 w4; equals w1 times the PHI-chart Jacobian.
Complex degeneracy_polynomial(Complex p);

Complex jacobian_phi(const Vec4c& w);
Complex jacobian_psi(const Vec4c& w);

/// Jacobian of F restricted to Q^3, in the chart with the larger of |w1|, |w3|
/// (ties go to PHI). Throws std::domain_error off the quadric (tolerance 1e-8).
ChartJacobian jacobian_restricted(const Vec4c& w);

/// sqrt((2 + sqrt 2) / 3): the smallest t for which the restricted map
/// degenerates somewhere on M_t^3.
double degeneracy_threshold();

/// The two values of w3 w4 at which the restricted Jacobian vanishes,
/// (3 + sqrt 2 - i) / 6 and (3 - sqrt 2 - i) / 6.
std::array<Complex, 2> degeneracy_products();

struct DegeneracyWitnesses {
  double t = 0.0;
  /// Canonical witnesses (w1, w3 real positive); empty when t is below threshold.
  std::vector<QuadricPoint> points;
  /// Minimum of norm_sum / 2 over the degeneracy locus. When it exceeds t it
  /// certifies that `points` is empty for a reason.
  double min_half_norm_sum = 0.0;
};

DegeneracyWitnesses degeneracy_points_at(double t);

}  // namespace arlab
