#include "arlab/armap.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace arlab {

namespace {
constexpr Complex I{0.0, 1.0};
}

MapValue eval_f(Complex z, Complex w) {
  const Complex zb = std::conj(z);
  const Complex wb = std::conj(w);
  return {z, w, w * zb * wb * wb + I * z * zb * zb * wb};
}

MapValue eval_F(const Vec4c& w) {
  const auto& [w1, w2, w3, w4] = w;
  return {w1, w3, w2 * w3 * w4 * w4 + I * w1 * w2 * w2 * w4};
}

Jacobian34 jacobian_F(const Vec4c& w) {
  const auto& [w1, w2, w3, w4] = w;
  Jacobian34 j = Jacobian34::Zero();
  j(0, 0) = 1.0;
  j(1, 2) = 1.0;
  j(2, 0) = I * w2 * w2 * w4;
  j(2, 1) = w3 * w4 * w4 + 2.0 * I * w1 * w2 * w4;
  j(2, 2) = w2 * w4 * w4;
  j(2, 3) = 2.0 * w2 * w3 * w4 + I * w1 * w2 * w2;
  return j;
}

std::array<double, 3> singular_values(const Jacobian34& j) {
  Eigen::JacobiSVD<Jacobian34> svd(j);
  const auto& s = svd.singularValues();
  return {s(0), s(1), s(2)};
}

bool has_full_rank(const Jacobian34& j, double rel_threshold) {
  const auto s = singular_values(j);
  return s[2] > rel_threshold * s[0];
}

const char* to_string(Chart c) { return c == Chart::PHI ? "PHI" : "PSI"; }

Complex degeneracy_polynomial(Complex p) {
  return (3.0 * I - 3.0) * p * p + (2.0 - 4.0 * I) * p + I;
}

Complex jacobian_phi(const Vec4c& w) { return degeneracy_polynomial(w[2] * w[3]) / w[0]; }

Complex jacobian_psi(const Vec4c& w) {
  const Complex q = w[0] * w[1];
  return -((3.0 - 3.0 * I) * q * q + (2.0 * I - 4.0) * q + 1.0) / w[2];
}

ChartJacobian jacobian_restricted(const Vec4c& w) {
  require_on_quadric(w, 1e-8, "jacobian_restricted");
  if (std::abs(w[0]) >= std::abs(w[2])) return {jacobian_phi(w), Chart::PHI};
  return {jacobian_psi(w), Chart::PSI};
}

double degeneracy_threshold() { return std::sqrt((2.0 + std::sqrt(2.0)) / 3.0); }

std::array<Complex, 2> degeneracy_products() {
  const double r2 = std::sqrt(2.0);
  return {Complex{(3.0 + r2) / 6.0, -1.0 / 6.0}, Complex{(3.0 - r2) / 6.0, -1.0 / 6.0}};
}

DegeneracyWitnesses degeneracy_points_at(double t) {
  DegeneracyWitnesses out;
  out.t = t;
  const double threshold = degeneracy_threshold();
  out.min_half_norm_sum = threshold;
  if (t < threshold) return out;

  // x + a/x + y + b/y = 2t with x = |w1|^2, y = |w3|^2, a = |w1 w2|^2,
  // b = |w3 w4|^2. Along x = sqrt(a) s, y = sqrt(b) s the left side is
  // (sqrt a + sqrt b)(s + 1/s) = threshold (s + 1/s).
  const double ratio = t / threshold;
  const double disc = std::max(0.0, ratio * ratio - 1.0);
  const double s_hi = ratio + std::sqrt(disc);
  std::vector<double> scales{s_hi};
  if (s_hi - 1.0 / s_hi > 1e-12) scales.push_back(1.0 / s_hi);

  for (const Complex& p : degeneracy_products()) {
    const double a = std::norm(1.0 - p);
    const double b = std::norm(p);
    for (double s : scales) {
      const double x = std::sqrt(a) * s;
      const double y = std::sqrt(b) * s;
      const Complex w1{std::sqrt(x), 0.0};
      const Complex w3{std::sqrt(y), 0.0};
      const Vec4c w{w1, (1.0 - p) / w1, w3, p / w3};
      out.points.emplace_back(w, kTolDerived);
    }
  }
  return out;
}

}  // namespace arlab
