#pragma once

// Geometry of the affine quadric Q^n = {z_1^2 + ... + z_{n+1}^2 = 1}, its
// SO(n+1)-orbits M_t^n, the unit sphere S^n and the domains D_t^n.
//
// Two coordinate systems are used for n = 3:
//   z-coordinates (z1, z2, z3, z4) in C^4, and
//   w-coordinates w1 = z1 + i z2, w2 = z1 - i z2, w3 = z3 + i z4, w4 = z3 - i z4,
// in which the quadric reads w1 w2 + w3 w4 = 1.

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

namespace arlab {

using Complex = std::complex<double>;
using Vec4c = std::array<Complex, 4>;

inline constexpr double kTolQuadric = 1e-12;
inline constexpr double kTolDerived = 1e-10;

Vec4c to_w_coords(const Vec4c& z);
Vec4c from_w_coords(const Vec4c& w);

/// |w1 w2 + w3 w4 - 1|.
double quadric_residual(const Vec4c& w);
/// |w1|^2 + |w2|^2 + |w3|^2 + |w4|^2, equal to 2t on M_t^3 and >= 2 on Q^3.
double norm_sum(const Vec4c& w);
double max_abs_diff(const Vec4c& a, const Vec4c& b);

/// A point of C^4 in w-coordinates that has been checked to lie on Q^3.
class QuadricPoint {
 public:
  /// Throws std::domain_error when the quadric residual exceeds `tol`.
  explicit QuadricPoint(const Vec4c& w, double tol = kTolQuadric);

  const Vec4c& w() const noexcept { return w_; }
  operator const Vec4c&() const noexcept { return w_; }
  const Complex& operator[](std::size_t i) const noexcept { return w_[i]; }

 private:
  Vec4c w_;
};

/// Throws std::domain_error unless `w` lies on Q^3 within `tol`.
void require_on_quadric(const Vec4c& w, double tol, const char* what);

/// A point x + iy of Q^n, x and y real (n+1)-vectors.
struct RealFramePoint {
  int n = 3;
  std::vector<double> x;
  std::vector<double> y;

  double x_norm() const;
  double y_norm() const;
  double inner_xy() const;
  /// |(|x|^2 - |y|^2 - 1)| + |(x, y)|.
  double quadric_residual() const;
  /// sum |z_i|^2 = |x|^2 + |y|^2.
  double abs_square_sum() const;

  /// z = x + iy; requires n = 3.
  Vec4c z() const;
  /// w-coordinates of x + iy; requires n = 3.
  Vec4c w() const;
  /// Inverse of w(): the real frame of a Q^3 point.
  static RealFramePoint from_w(const Vec4c& w);
};

struct Residuals {
  double quadric_residual = 0.0;
  Complex mu;             // w2 - conj(w1)
  Complex eta;            // w4 - conj(w3)
  double norm_excess = 0.0;  // norm_sum / 2 - 1
};

Residuals residuals(const Vec4c& w);

bool on_sphere(const Vec4c& w, double tol = kTolDerived);
bool on_mt(const Vec4c& w, double t, double tol = kTolDerived);
/// Membership in U_eps = {|mu| < eps, |eta| < eps} within Q^3.
bool in_ueps(const Vec4c& w, double eps, double quadric_tol = kTolDerived);
/// Membership in D_t^3 = {norm_sum < 2t} within Q^3.
bool in_dt(const Vec4c& w, double t, double quadric_tol = kTolDerived);

/// Deterministic per-(seed, index) random stream, so parallel draws are
/// reproducible regardless of scheduling.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

/// Radii of the x and y components on M_t^n.
double mt_x_radius(double t);
double mt_y_radius(double t);

/// Draws one point of M_t^n from the stream.
RealFramePoint draw_mt(int n, double t, std::mt19937_64& rng);

/// `count` points of M_t^n; element k depends only on (seed, k).
/// Throws std::invalid_argument for t <= 1, n < 2 or count < 1.
std::vector<RealFramePoint> sample_mt(int n, double t, int count, std::uint64_t seed);

/// `count` points of S^n (the y = 0 orbit).
std::vector<RealFramePoint> sample_sphere(int n, int count, std::uint64_t seed);

/// Pulls M_t^3 points back into a fixed set: rescales x and y to the radii of
/// M_t after orthogonalizing y against x. The input must have x != 0.
RealFramePoint project_to_mt(const RealFramePoint& p, double t);

/// (x + iy, s) -> sqrt(1 + s^2 |y|^2) / |x| * x + i s y.
RealFramePoint retract(const RealFramePoint& p, double s);

nlohmann::json to_json(const Vec4c& w);
Vec4c vec4c_from_json(const nlohmann::json& j);
nlohmann::json points_to_json(const std::vector<RealFramePoint>& points);
std::string points_to_csv(const std::vector<RealFramePoint>& points);

}  // namespace arlab
