#include "arlab/quadric.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace arlab {

namespace {

constexpr Complex I{0.0, 1.0};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> gaussian_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& c : v) c = normal(rng);
  return v;
}

// Uniform point on the radius-`r` sphere in R^dim.
std::vector<double> sphere_vector(std::size_t dim, double r, std::mt19937_64& rng) {
  for (;;) {
    auto v = gaussian_vector(dim, rng);
    const double len = norm(v);
    if (len < 1e-8) continue;
    for (auto& c : v) c *= r / len;
    return v;
  }
}

// Uniform unit vector orthogonal to the unit vector `u`, scaled by r.
std::vector<double> orthogonal_vector(const std::vector<double>& u, double r,
                                      std::mt19937_64& rng) {
  for (;;) {
    auto v = gaussian_vector(u.size(), rng);
    const double along = dot(v, u);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= along * u[i];
    const double len = norm(v);
    if (len < 1e-8) continue;
    for (auto& c : v) c *= r / len;
    return v;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Vec4c to_w_coords(const Vec4c& z) {
  return {z[0] + I * z[1], z[0] - I * z[1], z[2] + I * z[3], z[2] - I * z[3]};
}

Vec4c from_w_coords(const Vec4c& w) {
  return {(w[0] + w[1]) * 0.5, (w[0] - w[1]) / (2.0 * I), (w[2] + w[3]) * 0.5,
          (w[2] - w[3]) / (2.0 * I)};
}

double quadric_residual(const Vec4c& w) { return std::abs(w[0] * w[1] + w[2] * w[3] - 1.0); }

double norm_sum(const Vec4c& w) {
  return std::norm(w[0]) + std::norm(w[1]) + std::norm(w[2]) + std::norm(w[3]);
}

double max_abs_diff(const Vec4c& a, const Vec4c& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

QuadricPoint::QuadricPoint(const Vec4c& w, double tol) : w_(w) {
  require_on_quadric(w, tol, "QuadricPoint");
}

void require_on_quadric(const Vec4c& w, double tol, const char* what) {
  const double r = quadric_residual(w);
  if (!(r <= tol)) {
    std::ostringstream os;
    os << what << ": point is off the quadric w1*w2 + w3*w4 = 1 (residual " << r
       << " > " << tol << ")";
    throw std::domain_error(os.str());
  }
}

double RealFramePoint::x_norm() const { return norm(x); }
double RealFramePoint::y_norm() const { return norm(y); }
double RealFramePoint::inner_xy() const { return dot(x, y); }

double RealFramePoint::quadric_residual() const {
  return std::abs(dot(x, x) - dot(y, y) - 1.0) + std::abs(dot(x, y));
}

double RealFramePoint::abs_square_sum() const { return dot(x, x) + dot(y, y); }

Vec4c RealFramePoint::z() const {
  if (n != 3) throw std::logic_error("RealFramePoint::z requires n = 3");
  return {Complex{x[0], y[0]}, Complex{x[1], y[1]}, Complex{x[2], y[2]},
          Complex{x[3], y[3]}};
}

Vec4c RealFramePoint::w() const { return to_w_coords(z()); }

RealFramePoint RealFramePoint::from_w(const Vec4c& w) {
  const Vec4c z = from_w_coords(w);
  RealFramePoint p;
  p.n = 3;
  p.x.resize(4);
  p.y.resize(4);
  for (std::size_t i = 0; i < 4; ++i) {
    p.x[i] = z[i].real();
    p.y[i] = z[i].imag();
  }
  return p;
}

Residuals residuals(const Vec4c& w) {
  Residuals r;
  r.quadric_residual = quadric_residual(w);
  r.mu = w[1] - std::conj(w[0]);
  r.eta = w[3] - std::conj(w[2]);
  r.norm_excess = norm_sum(w) / 2.0 - 1.0;
  return r;
}

bool on_sphere(const Vec4c& w, double tol) {
  const Residuals r = residuals(w);
  return r.quadric_residual <= tol && std::abs(r.mu) <= tol && std::abs(r.eta) <= tol;
}

bool on_mt(const Vec4c& w, double t, double tol) {
  return quadric_residual(w) <= tol && std::abs(norm_sum(w) - 2.0 * t) <= 2.0 * tol;
}

bool in_ueps(const Vec4c& w, double eps, double quadric_tol) {
  const Residuals r = residuals(w);
  return r.quadric_residual <= quadric_tol && std::abs(r.mu) < eps && std::abs(r.eta) < eps;
}

bool in_dt(const Vec4c& w, double t, double quadric_tol) {
  return quadric_residual(w) <= quadric_tol && norm_sum(w) < 2.0 * t;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

double mt_x_radius(double t) { return std::sqrt((t + 1.0) / 2.0); }
double mt_y_radius(double t) { return std::sqrt((t - 1.0) / 2.0); }

RealFramePoint draw_mt(int n, double t, std::mt19937_64& rng) {
  const auto dim = static_cast<std::size_t>(n + 1);
  RealFramePoint p;
  p.n = n;
  p.x = sphere_vector(dim, 1.0, rng);
  p.y = orthogonal_vector(p.x, mt_y_radius(t), rng);
  const double rx = mt_x_radius(t);
  for (auto& c : p.x) c *= rx;
  return p;
}

std::vector<RealFramePoint> sample_mt(int n, double t, int count, std::uint64_t seed) {
  if (!(t > 1.0)) throw std::invalid_argument("t must exceed 1");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  std::vector<RealFramePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
    out.push_back(draw_mt(n, t, rng));
  }
  return out;
}

std::vector<RealFramePoint> sample_sphere(int n, int count, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  std::vector<RealFramePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(k));
    RealFramePoint p;
    p.n = n;
    p.x = sphere_vector(static_cast<std::size_t>(n + 1), 1.0, rng);
    p.y.assign(static_cast<std::size_t>(n + 1), 0.0);
    out.push_back(std::move(p));
  }
  return out;
}

RealFramePoint project_to_mt(const RealFramePoint& p, double t) {
  RealFramePoint q = p;
  const double xn = norm(q.x);
  if (!(xn > 0.0)) throw std::invalid_argument("x must be nonzero");
  for (auto& c : q.x) c /= xn;
  const double along = dot(q.y, q.x);
  for (std::size_t i = 0; i < q.y.size(); ++i) q.y[i] -= along * q.x[i];
  const double yn = norm(q.y);
  const double rx = mt_x_radius(t);
  const double ry = mt_y_radius(t);
  for (auto& c : q.x) c *= rx;
  if (yn > 0.0) {
    for (auto& c : q.y) c *= ry / yn;
  }
  return q;
}

RealFramePoint retract(const RealFramePoint& p, double s) {
  const double xn = p.x_norm();
  // On Q^n, |x|^2 = 1 + |y|^2 >= 1.
  if (!(xn > 0.0)) throw std::invalid_argument("x must be nonzero");
  const double yn = p.y_norm();
  const double scale = std::sqrt(1.0 + s * s * yn * yn) / xn;
  RealFramePoint q = p;
  for (auto& c : q.x) c *= scale;
  for (auto& c : q.y) c *= s;
  return q;
}

nlohmann::json to_json(const Vec4c& w) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : w) j.push_back({c.real(), c.imag()});
  return j;
}

Vec4c vec4c_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("expected 4 [re,im] pairs");
  Vec4c w;
  for (std::size_t i = 0; i < 4; ++i) w[i] = Complex{j[i].at(0).get<double>(), j[i].at(1).get<double>()};
  return w;
}

nlohmann::json points_to_json(const std::vector<RealFramePoint>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) {
    if (p.n == 3) {
      arr.push_back(to_json(p.w()));
    } else {
      arr.push_back({{"x", p.x}, {"y", p.y}});
    }
  }
  return arr;
}

std::string points_to_csv(const std::vector<RealFramePoint>& points) {
  std::ostringstream os;
  os.precision(17);
  if (points.empty()) return {};
  const int n = points.front().n;
  if (n == 3) {
    os << "re(w1),im(w1),re(w2),im(w2),re(w3),im(w3),re(w4),im(w4)\n";
    for (const auto& p : points) {
      const Vec4c w = p.w();
      for (std::size_t i = 0; i < 4; ++i) {
        os << w[i].real() << ',' << w[i].imag() << (i == 3 ? '\n' : ',');
      }
    }
  } else {
    for (int i = 0; i <= n; ++i) os << 'x' << i << ',';
    for (int i = 0; i <= n; ++i) os << 'y' << i << (i == n ? '\n' : ',');
    for (const auto& p : points) {
      for (double v : p.x) os << v << ',';
      for (std::size_t i = 0; i < p.y.size(); ++i) os << p.y[i] << (i + 1 == p.y.size() ? '\n' : ',');
    }
  }
  return os.str();
}

}  // namespace arlab
