#include "arlab/arfamily.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "arlab/optimize.hpp"

namespace arlab {

namespace {

enum Var { Z = 0, ZB = 1, W = 2, WB = 3 };

HarmonicPoly var(Var v) { return HarmonicPoly::variable(v); }

}  // namespace

Bidegree bidegree(const Exponents& e) { return {e[Z] + e[W], e[ZB] + e[WB]}; }

std::map<Bidegree, HarmonicPoly> bidegree_parts(const HarmonicPoly& p) {
  std::map<Bidegree, HarmonicPoly> parts;
  for (const auto& [e, c] : p.terms()) parts[bidegree(e)].add_term(e, c);
  return parts;
}

HarmonicPoly laplacian(const HarmonicPoly& p) {
  const HarmonicPoly sum = p.derivative(Z).derivative(ZB) + p.derivative(W).derivative(WB);
  return sum * GaussRational(4);
}

bool is_harmonic(const HarmonicPoly& p) { return laplacian(p).is_zero(); }

HarmonicPoly rotation_operator(const HarmonicPoly& p) {
  return var(ZB) * p.derivative(W) - var(WB) * p.derivative(Z);
}

HarmonicPoly ar_operator(const HarmonicPoly& q) {
  HarmonicPoly weighted;
  for (const auto& [deg, part] : bidegree_parts(q)) {
    const auto [p_j, q_j] = deg;
    if (p_j == 0) {
      std::ostringstream os;
      os << "ar_operator: bihomogeneous part of bidegree (0," << q_j << ") [" << part.to_string()
         << "] has no weight 1/(p(q+1)) with p = 0";
      throw ArFamilyError(os.str());
    }
    weighted = weighted + part * GaussRational(Rational(1, p_j * (q_j + 1)));
  }
  return rotation_operator(weighted);
}

HolomorphicPoly polarize(const HarmonicPoly& p) {
  HolomorphicPoly out;
  for (const auto& [e, c] : p.terms()) out.add_term(e, c);
  return out;
}

HarmonicPoly lift_term_by_sphere_factor(const HarmonicPoly& p, const Exponents& e) {
  const GaussRational c = p.coefficient(e);
  if (c.is_zero()) throw ArFamilyError("lift_term_by_sphere_factor: term not present");
  const HarmonicPoly term = HarmonicPoly::monomial(e, c);
  const HarmonicPoly sphere = var(Z) * var(ZB) + var(W) * var(WB);
  return p - term + term * sphere;
}

HarmonicPoly ahern_rudin_generating_q() {
  const HarmonicPoly zz = var(Z) * var(ZB);
  const HarmonicPoly ww = var(W) * var(WB);
  return zz * zz - zz * ww * GaussRational(4) + ww * ww +
         (ww - zz) * GaussRational::imaginary_unit();
}

HarmonicPoly ahern_rudin_third_component() {
  const HarmonicPoly p = ar_operator(ahern_rudin_generating_q());
  const HarmonicPoly lifted = lift_term_by_sphere_factor(p, {0, 1, 0, 1});
  return lifted * (GaussRational(1) / GaussRational(Rational(1), Rational(1)));
}

MapValue PolarizedMap::operator()(const Vec4c& w) const {
  return {w[0], w[2], third_.evaluate(w)};
}

ChartJacobian PolarizedMap::restricted_jacobian_fd(const Vec4c& w, double step) const {
  require_on_quadric(w, 1e-8, "restricted_jacobian_fd");
  const bool phi = std::abs(w[0]) >= std::abs(w[2]);
  Vec4c dir = phi ? Vec4c{0.0, -w[2] / w[0], 0.0, 1.0} : Vec4c{0.0, 1.0, 0.0, -w[0] / w[2]};
  Vec4c plus = w;
  Vec4c minus = w;
  for (std::size_t i = 0; i < 4; ++i) {
    plus[i] += step * dir[i];
    minus[i] -= step * dir[i];
  }
  const Complex d = (third_.evaluate(plus) - third_.evaluate(minus)) / (2.0 * step);
  return phi ? ChartJacobian{d, Chart::PHI} : ChartJacobian{-d, Chart::PSI};
}

PolarizedMap build_G(const HarmonicPoly& q) { return PolarizedMap(polarize(ar_operator(q))); }

PolarizedMap build_G_from_P(const HarmonicPoly& p) { return PolarizedMap(polarize(p)); }

PolarizedMap ahern_rudin_G() { return build_G_from_P(ahern_rudin_third_component()); }

bool divisibility_check(const HarmonicPoly& q) {
  for (const auto& [e, c] : q.terms()) {
    if (e[Z] != e[ZB] || e[W] != e[WB]) {
      throw ArFamilyError("divisibility_check: q must be a polynomial in |z|^2 and |w|^2, found " +
                          HarmonicPoly::monomial(e, c).to_string());
    }
  }
  const HarmonicPoly p = ar_operator(q);
  return std::all_of(p.terms().begin(), p.terms().end(),
                     [](const auto& kv) { return kv.first[ZB] >= 1 && kv.first[WB] >= 1; });
}

NonvanishingResult q_nonvanishing_check(const HarmonicPoly& q, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  auto eval = [&](double theta, double alpha, double beta) {
    const Complex z = std::polar(std::cos(theta), alpha);
    const Complex w = std::polar(std::sin(theta), beta);
    return std::abs(q.evaluate({z, std::conj(z), w, std::conj(w)}));
  };

  struct Start {
    double value;
    std::array<double, 3> angles;
  };
  std::vector<Start> starts;
  starts.reserve(static_cast<std::size_t>(samples));
  for (const auto& p : sample_sphere(3, samples, seed)) {
    const Complex z{p.x[0], p.x[1]};
    const Complex w{p.x[2], p.x[3]};
    const std::array<double, 3> a{std::atan2(std::abs(w), std::abs(z)), std::arg(z), std::arg(w)};
    starts.push_back({eval(a[0], a[1], a[2]), a});
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Start& a, const Start& b) { return a.value < b.value; });

  NonvanishingResult best{std::numeric_limits<double>::infinity(), {}, {}};
  const std::size_t refine = std::min<std::size_t>(8, starts.size());
  for (std::size_t k = 0; k < refine; ++k) {
    const auto& a = starts[k].angles;
    const auto r = nelder_mead(
        [&](std::span<const double> v) { return eval(v[0], v[1], v[2]); },
        {a[0], a[1], a[2]}, 0.1, 3000, 1e-14);
    if (r.value < best.min_abs) {
      best.min_abs = r.value;
      best.z = std::polar(std::cos(r.x[0]), r.x[1]);
      best.w = std::polar(std::sin(r.x[0]), r.x[2]);
    }
  }
  return best;
}

}  // namespace arlab
