#pragma once

// Sparse polynomials in four variables with exact Gaussian-rational
// coefficients. The same representation serves two roles:
//   HarmonicPoly    - real-analytic polynomials in z, zb, w, wb on C^2;
//   HolomorphicPoly - holomorphic polynomials in w1, w2, w3, w4 on C^4.

#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace arlab {

using Rational = boost::multiprecision::cpp_rational;

struct GaussRational {
  Rational re;
  Rational im;

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT: implicit by design of literals
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long long r) : re(r) {}  // NOLINT

  static GaussRational imaginary_unit() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  /// Throws std::domain_error on division by zero.
  friend GaussRational operator/(const GaussRational& a, const GaussRational& b);

  GaussRational& operator+=(const GaussRational& b) { return *this = *this + b; }
  GaussRational& operator*=(const GaussRational& b) { return *this = *this * b; }
};

/// Canonical text form: "3/2", "-1/4i", "(3/2-1/4i)".
std::string to_string(const GaussRational& c);

/// Exponents (a, b, c, d) of the four variables.
using Exponents = std::array<int, 4>;

struct HarmonicVars {
  static constexpr std::array<std::string_view, 4> names{"z", "zb", "w", "wb"};
};
struct HolomorphicVars {
  static constexpr std::array<std::string_view, 4> names{"w1", "w2", "w3", "w4"};
};

template <class Vars>
class SparsePoly {
 public:
  using Terms = std::map<Exponents, GaussRational>;

  SparsePoly() = default;

  static SparsePoly constant(const GaussRational& c) {
    SparsePoly p;
    p.add_term({0, 0, 0, 0}, c);
    return p;
  }
  static SparsePoly monomial(const Exponents& e, const GaussRational& c = GaussRational(1)) {
    SparsePoly p;
    p.add_term(e, c);
    return p;
  }
  static SparsePoly variable(int index) {
    Exponents e{0, 0, 0, 0};
    e[static_cast<std::size_t>(index)] = 1;
    return monomial(e);
  }

  /// Merges `c` into the coefficient of `e`; zero results are erased.
  void add_term(const Exponents& e, const GaussRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  GaussRational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? GaussRational{} : it->second;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.terms_ == b.terms_; }

  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, c);
    return a;
  }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, -c);
    return a;
  }
  friend SparsePoly operator-(const SparsePoly& a) { return a * GaussRational(-1); }
  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    SparsePoly out;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]}, ca * cb);
      }
    }
    return out;
  }
  friend SparsePoly operator*(const SparsePoly& a, const GaussRational& s) {
    SparsePoly out;
    for (const auto& [e, c] : a.terms_) out.add_term(e, c * s);
    return out;
  }

  SparsePoly pow(int k) const {
    if (k < 0) throw std::domain_error("negative polynomial power");
    SparsePoly out = constant(GaussRational(1));
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  /// Formal partial derivative with respect to variable `index` (0..3).
  SparsePoly derivative(int index) const {
    SparsePoly out;
    const auto k = static_cast<std::size_t>(index);
    for (const auto& [e, c] : terms_) {
      if (e[k] == 0) continue;
      Exponents f = e;
      f[k] -= 1;
      out.add_term(f, c * GaussRational(static_cast<long long>(e[k])));
    }
    return out;
  }

  /// Evaluates the polynomial with the four variables bound to `x`.
  std::complex<double> evaluate(const std::array<std::complex<double>, 4>& x) const {
    std::complex<double> sum{};
    for (const auto& [e, c] : terms_) {
      std::complex<double> term = c.to_complex();
      for (std::size_t i = 0; i < 4; ++i) {
        for (int k = 0; k < e[i]; ++k) term *= x[i];
      }
      sum += term;
    }
    return sum;
  }

  GaussRational evaluate_exact(const std::array<GaussRational, 4>& x) const {
    GaussRational sum;
    for (const auto& [e, c] : terms_) {
      GaussRational term = c;
      for (std::size_t i = 0; i < 4; ++i) {
        for (int k = 0; k < e[i]; ++k) term *= x[i];
      }
      sum += term;
    }
    return sum;
  }

  /// Canonical text, terms in lexicographic order of exponents; parseable by
  /// the matching parser.
  std::string to_string() const;

 private:
  Terms terms_;
};

using HarmonicPoly = SparsePoly<HarmonicVars>;
using HolomorphicPoly = SparsePoly<HolomorphicVars>;

extern template class SparsePoly<HarmonicVars>;
extern template class SparsePoly<HolomorphicVars>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Grammar (whitespace-insensitive):
///   expr   := [+|-] term {(+|-) term}
///   term   := power {(*|/) power}        ('/' only by constants)
///   power  := primary [^ integer]
///   primary:= number | i | z | zb | w | wb | ( expr )
///   number := digits [/ digits] [i]      e.g. 3, 3/2, 1/4i
/// Throws ParseError with the byte offset of the problem.
HarmonicPoly parse_poly(std::string_view text);
HolomorphicPoly parse_holomorphic_poly(std::string_view text);

template <class Vars>
nlohmann::json to_json(const SparsePoly<Vars>& p);
template <class Vars>
SparsePoly<Vars> poly_from_json(const nlohmann::json& j);

}  // namespace arlab
