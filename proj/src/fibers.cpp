#include "arlab/fibers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "arlab/armap.hpp"

namespace arlab {

namespace {

constexpr Complex I{0.0, 1.0};

double map_residual(const Vec4c& a, const Vec4c& b) {
  const MapValue fa = eval_F(a);
  const MapValue fb = eval_F(b);
  double m = 0.0;
  for (std::size_t k = 0; k < 3; ++k) m = std::max(m, std::abs(fa[k] - fb[k]));
  return m;
}

}  // namespace

std::array<Complex, 3> fiber_quadratic(Complex w3, Complex w4) {
  const Complex p = w3 * w4;
  return {(I - 1.0) * w3 * w3, (1.0 - 2.0 * I) * w3 + (I - 1.0) * w3 * p,
          I + (1.0 - 2.0 * I) * p + (I - 1.0) * p * p};
}

Complex eval_fiber_quadratic(Complex w3, Complex w4, Complex x) {
  const auto [a, b, c] = fiber_quadratic(w3, w4);
  return (a * x + b) * x + c;
}

Complex discriminant(Complex p) { return 6.0 * I * p * p - (2.0 + 6.0 * I) * p + 1.0; }

std::array<Complex, 2> fiber_roots(Complex w3, Complex w4) {
  const Complex p = w3 * w4;
  const Complex center = 2.0 * I - 1.0 + (1.0 - I) * p;
  const Complex root = std::sqrt(discriminant(p));
  const Complex denom = (2.0 * I - 2.0) * w3;
  // The larger-magnitude numerator is cancellation free; the other root
  // comes from the product of roots c / a.
  const Complex plus = center + root;
  const Complex minus = center - root;
  const auto [a, b, c] = fiber_quadratic(w3, w4);
  (void)b;
  if (std::abs(plus) >= std::abs(minus)) {
    const Complex r1 = plus / denom;
    const Complex r2 = (r1 != 0.0) ? c / (a * r1) : minus / denom;
    return {r1, r2};
  }
  const Complex r2 = minus / denom;
  const Complex r1 = (r2 != 0.0) ? c / (a * r2) : plus / denom;
  return {r1, r2};
}

FiberSet fiber(const Vec4c& base) {
  require_on_quadric(base, 1e-8, "fiber");
  FiberSet fs;
  fs.base = base;
  const auto& [w1, w2, w3, w4] = base;
  if (w1 == 0.0 || w3 == 0.0) return fs;

  const auto roots = fiber_roots(w3, w4);
  fs.roots.assign(roots.begin(), roots.end());
  fs.double_root = std::abs(discriminant(w3 * w4)) < kDoubleRootTol;

  const int count = fs.double_root ? 1 : 2;
  for (int k = 0; k < count; ++k) {
    const Complex x = roots[static_cast<std::size_t>(k)];
    if (std::abs(x - w4) <= kRootDedupTol) {
      fs.degenerate = true;
      continue;
    }
    FiberPartner partner;
    partner.point = {w1, (1.0 - w3 * x) / w1, w3, x};
    partner.multiplicity = fs.double_root ? 2 : 1;
    partner.quadric_residual = quadric_residual(partner.point);
    partner.map_residual = map_residual(partner.point, base);
    fs.partners.push_back(partner);
  }
  return fs;
}

TriplePoint triple_point(double u) {
  if (u == 0.0) throw std::invalid_argument("triple_point: u must be nonzero");
  const double inv = 1.0 / u;
  return TriplePoint{
      QuadricPoint({Complex{u}, Complex{inv}, Complex{u}, Complex{0.0}}),
      QuadricPoint({Complex{u}, Complex{0.0}, Complex{u}, Complex{inv}}),
      QuadricPoint({Complex{u}, Complex{0.5 * inv, 0.5 * inv}, Complex{u},
                    Complex{0.5 * inv, -0.5 * inv}}),
      u * u + 0.5 * inv * inv};
}

std::vector<double> triple_point_parameters(double t) {
  // 2u^4 - 2t u^2 + 1 = 0.
  // Roundoff near t = sqrt 2 is absorbed into a single double root.
  const double d = t * t - 2.0;
  if (d < -1e-14) return {};
  const double r = std::sqrt(std::max(d, 0.0));
  std::vector<double> out{std::sqrt((t + r) / 2.0)};
  if (r > 1e-7) out.push_back(std::sqrt((t - r) / 2.0));
  return out;
}

double partner_norm_excess(const FiberSet& fs, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : fs.partners) best = std::min(best, norm_sum(p.point) / 2.0 - t);
  return best;
}

double partner_norm_excess(const Vec4c& base, double t) {
  if (std::abs(norm_sum(base) / 2.0 - t) > 1e-8) {
    std::ostringstream os;
    os << "partner_norm_excess: base is not on M_t for t = " << t;
    throw std::domain_error(os.str());
  }
  return partner_norm_excess(fiber(base), t);
}

double partner_collision_distance(const FiberSet& fs, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : fs.partners) best = std::min(best, std::abs(norm_sum(p.point) / 2.0 - t));
  return best;
}

nlohmann::json to_json(const FiberSet& fs) {
  nlohmann::json partners = nlohmann::json::array();
  for (const auto& p : fs.partners) {
    partners.push_back({{"point", to_json(p.point)},
                        {"multiplicity", p.multiplicity},
                        {"quadric_residual", p.quadric_residual},
                        {"map_residual", p.map_residual},
                        {"norm_sum", norm_sum(p.point)}});
  }
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& r : fs.roots) roots.push_back({r.real(), r.imag()});
  const MapValue image = eval_F(fs.base);
  nlohmann::json img = nlohmann::json::array();
  for (const auto& c : image) img.push_back({c.real(), c.imag()});
  return {{"base", to_json(fs.base)},
          {"base_quadric_residual", quadric_residual(fs.base)},
          {"base_norm_sum", norm_sum(fs.base)},
          {"image", img},
          {"partners", partners},
          {"roots_w4", roots},
          {"cardinality", fs.cardinality()},
          {"double_root", fs.double_root},
          {"degenerate", fs.degenerate}};
}

}  // namespace arlab
