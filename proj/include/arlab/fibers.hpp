#pragma once

// Fibers of the restricted map F~ = F|Q^3 in closed form.
//
// Points with the same image share w1 and w3; the remaining coordinate w4^
// of a second preimage solves a quadratic whose coefficients depend on
// (w3, w4), and w2^ follows from the quadric relation.

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include "arlab/quadric.hpp"

namespace arlab {

inline constexpr double kRootDedupTol = 1e-10;
inline constexpr double kDoubleRootTol = 1e-14;

struct FiberPartner {
  Vec4c point;
  /// 2 when the quadratic has a double root there.
  int multiplicity = 1;
  double quadric_residual = 0.0;
  /// max_k |F(partner)_k - F(base)_k|.
  double map_residual = 0.0;
};

struct FiberSet {
  Vec4c base;
  std::vector<FiberPartner> partners;
  /// The quadratic had a double root.
  bool double_root = false;
  /// base's own w4 solves the quadratic (the restricted Jacobian vanishes at base).
  bool degenerate = false;
  /// Both quadratic roots, before deduplication; empty when w1 = 0 or w3 = 0.
  std::vector<Complex> roots;

  /// Number of distinct points in the fiber, base included.
  int cardinality() const { return 1 + static_cast<int>(partners.size()); }
};

/// Coefficients (a, b, c) of a x^2 + b x + c = 0 for x = w4^.
std::array<Complex, 3> fiber_quadratic(Complex w3, Complex w4);
Complex eval_fiber_quadratic(Complex w3, Complex w4, Complex x);

/// 6i p^2 - (2 + 6i) p + 1, the discriminant of the fiber quadratic over w3^2.
Complex discriminant(Complex p);

/// Both roots w4^ of the fiber quadratic (w3 != 0).
std::array<Complex, 2> fiber_roots(Complex w3, Complex w4);

/// Throws std::domain_error for a base off the quadric (tolerance 1e-8).
FiberSet fiber(const Vec4c& base);

struct TriplePoint {
  QuadricPoint a;  // (u, 1/u, u, 0)
  QuadricPoint b;  // (u, 0, u, 1/u)
  QuadricPoint c;  // (u, (1+i)/(2u), u, (1-i)/(2u))
  double t = 0.0;  // u^2 + 1/(2u^2)
};

/// Three points of M_t^3 sharing the image (u, u, 0). Throws for u = 0.
TriplePoint triple_point(double u);

/// Real u > 0 with u^2 + 1/(2u^2) = t; empty for t < sqrt 2.
std::vector<double> triple_point_parameters(double t);

/// min over partners of norm_sum(partner)/2 - t; +inf without partners.
/// Requires base on M_t^3 (tolerance 1e-8).
double partner_norm_excess(const Vec4c& base, double t);
double partner_norm_excess(const FiberSet& fs, double t);

/// min over partners of |norm_sum(partner)/2 - t|: zero exactly when some
/// partner also lies on M_t^3.
double partner_collision_distance(const FiberSet& fs, double t);

nlohmann::json to_json(const FiberSet& fs);

}  // namespace arlab
