#include "arlab/poly.hpp"

#include <limits>
#include <sstream>

namespace arlab {

GaussRational operator/(const GaussRational& a, const GaussRational& b) {
  const Rational den = b.re * b.re + b.im * b.im;
  if (den == 0) throw std::domain_error("division by zero coefficient");
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

// Sign-free rendering of c and whether a leading minus is needed.
std::pair<std::string, bool> split_sign(const GaussRational& c) {
  if (c.im == 0) return {rational_text(abs(c.re)), c.re < 0};
  if (c.re == 0) {
    const Rational m = abs(c.im);
    return {(m == 1 ? std::string{} : rational_text(m)) + "i", c.im < 0};
  }
  std::string s = "(" + rational_text(c.re) + (c.im < 0 ? "-" : "+") +
                  (abs(c.im) == 1 ? std::string{} : rational_text(abs(c.im))) + "i)";
  return {s, false};
}

nlohmann::json int_json(const boost::multiprecision::cpp_int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max()) {
    return static_cast<long long>(v);
  }
  return v.str();
}

boost::multiprecision::cpp_int int_from_json(const nlohmann::json& j) {
  if (j.is_string()) return boost::multiprecision::cpp_int(j.get<std::string>());
  return boost::multiprecision::cpp_int(j.get<long long>());
}

}  // namespace

std::string to_string(const GaussRational& c) {
  auto [body, neg] = split_sign(c);
  return (neg ? "-" : "") + body;
}

template <class Vars>
std::string SparsePoly<Vars>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    auto [body, neg] = split_sign(c);
    std::ostringstream mono;
    bool any = false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (e[i] == 0) continue;
      if (any) mono << '*';
      mono << Vars::names[i];
      if (e[i] > 1) mono << '^' << e[i];
      any = true;
    }
    if (first) {
      if (neg) os << '-';
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    if (!any) {
      os << body;
    } else if (body == "1") {
      os << mono.str();
    } else {
      os << body << '*' << mono.str();
    }
  }
  return os.str();
}

template class SparsePoly<HarmonicVars>;
template class SparsePoly<HolomorphicVars>;

template <class Vars>
nlohmann::json to_json(const SparsePoly<Vars>& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    arr.push_back({{e[0], e[1], e[2], e[3]},
                   {int_json(numerator(c.re)), int_json(denominator(c.re)),
                    int_json(numerator(c.im)), int_json(denominator(c.im))}});
  }
  return arr;
}

template <class Vars>
SparsePoly<Vars> poly_from_json(const nlohmann::json& j) {
  SparsePoly<Vars> p;
  for (const auto& entry : j) {
    const auto& ex = entry.at(0);
    const auto& co = entry.at(1);
    Exponents e{ex.at(0).get<int>(), ex.at(1).get<int>(), ex.at(2).get<int>(), ex.at(3).get<int>()};
    Rational re(int_from_json(co.at(0)), int_from_json(co.at(1)));
    Rational im(int_from_json(co.at(2)), int_from_json(co.at(3)));
    p.add_term(e, GaussRational(re, im));
  }
  return p;
}

template nlohmann::json to_json(const SparsePoly<HarmonicVars>&);
template nlohmann::json to_json(const SparsePoly<HolomorphicVars>&);
template SparsePoly<HarmonicVars> poly_from_json(const nlohmann::json&);
template SparsePoly<HolomorphicVars> poly_from_json(const nlohmann::json&);

}  // namespace arlab
