#pragma once

// Closed-form certificate that F~ is injective on the neighbourhood
//   U_eps = {|w2 - conj(w1)| < eps, |w4 - conj(w3)| < eps} of S^3 in Q^3,
// and hence embeds M_t^3 for 1 < t < 1 + eps^2 / 2.
//
// A fiber partner W^ of W in U_eps satisfies
//   cond1(w3) + L(eta, w3) = R(eta^, eta, w3),
// with |cond1| >= 4/3, |L| < 32 eps^2 + 224 eps and |R| < 32 |eta^|^2 + 256 |eta^|
// for |w3| < 2. Whenever the positive root of 32 x^2 + 256 x = 4/3 - |L|-bound
// is at least eps, no partner can return to U_eps.

#include <json.hpp>

#include "arlab/quadric.hpp"

namespace arlab {

enum class MarginMode {
  /// Uses the full margin 4/3 - (32 eps^2 + 224 eps).
  Full,
  /// Requires 32 eps^2 + 224 eps < 1/3 and uses the weaker right-hand side 1.
  Strict,
};

/// -8 s + 4 + i (24 s^2 - 24 s + 4) at s = |w3|^2.
Complex cond1_expression(double s);
inline double cond1_modulus(double s) { return std::abs(cond1_expression(s)); }

struct Cond1Minimum {
  double value = 0.0;
  double argmin = 0.0;
};

/// Global minimum of |cond1| over s >= 0; asserts it is at least 4/3.
Cond1Minimum cond1_minimum();

/// 24i eta |w3|^2 w3 + 8i eta^2 w3^2 - (4 + 12i) eta w3.
Complex lhs_bracket(Complex eta, Complex w3);
/// -24i eta^ |w3|^2 w3 - 8i (eta^2 + eta eta^) w3^2 + (4 + 12i) eta^ w3.
Complex rhs_bracket(Complex eta_hat, Complex eta, Complex w3);

/// 32 eps^2 + 224 eps; throws std::domain_error unless 0 < eps < 1.
double lhs_perturbation_bound(double epsilon);
/// 32 eta^2 + 256 eta (the eta * eta^ cross term absorbed for |eta| < eps < 1).
double rhs_coefficient_bound(double eta_hat, double epsilon);

/// Positive root of 32 x^2 + 256 x = m, where m is the margin of `mode`.
/// Throws std::domain_error when the margin is not positive.
double eta_hat_lower_bound(double epsilon, MarginMode mode = MarginMode::Full);

/// Positive root of 32 x^2 + 256 x = m.
double positive_root_32_256(double m);

struct Certificate {
  double epsilon = 0.0;
  MarginMode mode = MarginMode::Full;
  double w3_bound = 2.0;
  double cond1_floor = 4.0 / 3.0;
  double lhs_bound = 0.0;
  double lhs_margin = 0.0;  // 4/3 - lhs_bound
  /// Positive root of 32x^2 + 256x = margin (full mode) or = 1 (strict mode); NaN if none.
  double eta_hat_threshold = 0.0;
  /// 32 eps^2 + 224 eps < 1/3, the condition under which the strict mode applies.
  bool strict_condition = false;
  /// Root of 32x^2 + 256x = 1 when strict_condition holds, else NaN.
  double strict_eta_hat = 0.0;
  double t_lower = 0.0;  // 1 + eps^2 / 2
  bool valid = false;
};

/// Throws std::domain_error unless 0 < eps < 1; invalid chains come back with valid = false.
Certificate certify(double epsilon, MarginMode mode = MarginMode::Full);

struct EpsilonOptimum {
  double epsilon_star = 0.0;
  double t_lower_star = 0.0;
};

/// Largest eps (bisection to 1e-9) with a valid full-margin certificate.
EpsilonOptimum optimize_epsilon(double tolerance = 1e-9);

nlohmann::json to_json(const Certificate& c);
const char* to_string(MarginMode m);

}  // namespace arlab
