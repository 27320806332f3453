#include "arlab/certify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace arlab {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0, 1)");
}

}  // namespace

Complex cond1_expression(double s) {
  return Complex{-8.0 * s + 4.0, 24.0 * s * s - 24.0 * s + 4.0};
}

Cond1Minimum cond1_minimum() {
  // For s >= 1 the imaginary part alone is >= 4, so the grid covers [0, 4]
  // and everything beyond is bounded by 24 s^2 - 24 s + 4 > 4/3.
  constexpr int kGrid = 40000;
  constexpr double kHi = 4.0;
  int best = 0;
  double best_val = cond1_modulus(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = cond1_modulus(kHi * k / kGrid);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double a = kHi * std::max(0, best - 1) / kGrid;
  double b = kHi * std::min(kGrid, best + 1) / kGrid;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  while (b - a > 1e-13) {
    if (cond1_modulus(c) < cond1_modulus(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  Cond1Minimum m;
  m.argmin = 0.5 * (a + b);
  m.value = cond1_modulus(m.argmin);
  if (m.value < 4.0 / 3.0) throw std::logic_error("cond1 minimum fell below 4/3");
  return m;
}

Complex lhs_bracket(Complex eta, Complex w3) {
  const double a = std::norm(w3);
  return 24.0 * I * eta * a * w3 + 8.0 * I * eta * eta * w3 * w3 - (4.0 + 12.0 * I) * eta * w3;
}

Complex rhs_bracket(Complex eta_hat, Complex eta, Complex w3) {
  const double a = std::norm(w3);
  return -24.0 * I * eta_hat * a * w3 - 8.0 * I * (eta_hat * eta_hat + eta * eta_hat) * w3 * w3 +
         (4.0 + 12.0 * I) * eta_hat * w3;
}

double lhs_perturbation_bound(double epsilon) {
  require_epsilon(epsilon);
  return 32.0 * epsilon * epsilon + 224.0 * epsilon;
}

double rhs_coefficient_bound(double eta_hat, double epsilon) {
  require_epsilon(epsilon);
  if (eta_hat < 0.0) throw std::domain_error("eta_hat must be nonnegative");
  return 32.0 * eta_hat * eta_hat + 256.0 * eta_hat;
}

double positive_root_32_256(double m) {
  if (!(m > 0.0)) throw std::domain_error("margin must be positive");
  // 2m / (256 + sqrt(256^2 + 128 m)) avoids the cancellation of the textbook form.
  return 2.0 * m / (256.0 + std::sqrt(256.0 * 256.0 + 128.0 * m));
}

double eta_hat_lower_bound(double epsilon, MarginMode mode) {
  const double lhs = lhs_perturbation_bound(epsilon);
  if (mode == MarginMode::Strict) {
    if (!(lhs < 1.0 / 3.0)) throw std::domain_error("32 eps^2 + 224 eps must be below 1/3");
    return positive_root_32_256(1.0);
  }
  const double margin = 4.0 / 3.0 - lhs;
  if (!(margin > 0.0)) throw std::domain_error("no certificate: 4/3 - (32 eps^2 + 224 eps) <= 0");
  return positive_root_32_256(margin);
}

Certificate certify(double epsilon, MarginMode mode) {
  require_epsilon(epsilon);
  Certificate c;
  c.epsilon = epsilon;
  c.mode = mode;
  c.lhs_bound = lhs_perturbation_bound(epsilon);
  c.lhs_margin = 4.0 / 3.0 - c.lhs_bound;
  c.strict_condition = c.lhs_bound < 1.0 / 3.0;
  c.strict_eta_hat = c.strict_condition ? positive_root_32_256(1.0) : kNaN;
  c.t_lower = 1.0 + epsilon * epsilon / 2.0;
  if (mode == MarginMode::Strict) {
    c.eta_hat_threshold = c.strict_eta_hat;
    c.valid = c.strict_condition && c.strict_eta_hat >= epsilon;
  } else if (c.lhs_margin > 0.0) {
    c.eta_hat_threshold = positive_root_32_256(c.lhs_margin);
    c.valid = c.eta_hat_threshold >= epsilon;
  } else {
    c.eta_hat_threshold = kNaN;
    c.valid = false;
  }
  return c;
}

EpsilonOptimum optimize_epsilon(double tolerance) {
  double lo = 1e-9;
  double hi = 0.5;
  if (!certify(lo).valid || certify(hi).valid) throw std::logic_error("optimize_epsilon: bracket lost");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (certify(mid).valid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, 1.0 + lo * lo / 2.0};
}

const char* to_string(MarginMode m) { return m == MarginMode::Full ? "full" : "strict"; }

nlohmann::json to_json(const Certificate& c) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  return {{"epsilon", c.epsilon},
          {"mode", to_string(c.mode)},
          {"w3_bound", c.w3_bound},
          {"cond1_floor", c.cond1_floor},
          {"lhs_bound", c.lhs_bound},
          {"lhs_margin", c.lhs_margin},
          {"eta_hat_threshold", num(c.eta_hat_threshold)},
          {"strict_condition", c.strict_condition},
          {"strict_eta_hat", num(c.strict_eta_hat)},
          {"rhs_cross_term_note",
           "the eta*eta_hat term is absorbed into 256|eta_hat| using |eta| < eps < 1"},
          {"t_lower", c.t_lower},
          {"t_lower_minus_one", c.epsilon * c.epsilon / 2.0},
          {"valid", c.valid}};
}

}  // namespace arlab
