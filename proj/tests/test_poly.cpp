#include <doctest.h>

#include <random>

#include "arlab/poly.hpp"
#include "arlab/quadric.hpp"

using namespace arlab;

namespace {

GaussRational random_coeff(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-30, 30), den(1, 12), kind(0, 3);
  const int k = kind(rng);
  Rational re = k == 1 ? Rational(0) : Rational(num(rng), den(rng));
  Rational im = k == 0 ? Rational(0) : Rational(num(rng), den(rng));
  if (re == 0 && im == 0) re = 1;
  return {re, im};
}

HarmonicPoly random_poly(std::mt19937_64& rng, int max_terms = 6, int max_exp = 4) {
  std::uniform_int_distribution<int> terms(0, max_terms), ex(0, max_exp);
  HarmonicPoly p;
  const int n = terms(rng);
  for (int k = 0; k < n; ++k) p.add_term({ex(rng), ex(rng), ex(rng), ex(rng)}, random_coeff(rng));
  return p;
}

}  // namespace

TEST_CASE("coefficient printing") {
  CHECK(to_string(GaussRational(Rational(3, 2))) == "3/2");
  CHECK(to_string(GaussRational(Rational(0), Rational(-1, 4))) == "-1/4i");
  CHECK(to_string(GaussRational(Rational(3, 2), Rational(-1, 4))) == "(3/2-1/4i)");
  CHECK_THROWS_AS(GaussRational(1) / GaussRational(0), std::domain_error);
  const GaussRational q = GaussRational(Rational(1), Rational(2)) / GaussRational(Rational(3), Rational(-1));
  CHECK(q * GaussRational(Rational(3), Rational(-1)) == GaussRational(Rational(1), Rational(2)));
}

TEST_CASE("parse simple polynomials") {
  const HarmonicPoly a = parse_poly("zb*wb");
  CHECK(a.size() == 1);
  CHECK(a.coefficient({0, 1, 0, 1}) == GaussRational(1));

  const HarmonicPoly g = parse_poly("w*zb*wb^2 - z*zb^2*wb + i*zb*wb");
  CHECK(g.size() == 3);
  CHECK(g.coefficient({0, 1, 1, 2}) == GaussRational(1));
  CHECK(g.coefficient({1, 2, 0, 1}) == GaussRational(-1));
  CHECK(g.coefficient({0, 1, 0, 1}) == GaussRational::imaginary_unit());

  CHECK(parse_poly("(3/2+1/4i)*z") == HarmonicPoly::monomial({1, 0, 0, 0}, {Rational(3, 2), Rational(1, 4)}));
  CHECK(parse_poly("  z * z ") == parse_poly("z^2"));
  CHECK(parse_poly("zb*wb*( z*zb + w*wb )") == parse_poly("z*zb^2*wb + zb*w*wb^2"));
  CHECK(parse_poly("(z+w)^2") == parse_poly("z^2 + 2*z*w + w^2"));
  CHECK(parse_poly("z/2") == parse_poly("1/2*z"));
  CHECK(parse_poly("z - z").is_zero());
  CHECK(parse_poly("-z").to_string() == "-z");
  CHECK(parse_holomorphic_poly("w1*w2 + w3*w4").size() == 2);
}

TEST_CASE("parse errors carry the offset") {
  try {
    parse_poly("z^2 +");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse_poly("0.5*z"), ParseError);
  CHECK_THROWS_WITH(parse_poly("1e3*z"), doctest::Contains("non-rational"));
  CHECK_THROWS_AS(parse_poly("q*z"), ParseError);
  CHECK_THROWS_AS(parse_poly("(z"), ParseError);
  CHECK_THROWS_AS(parse_poly("z^"), ParseError);
  CHECK_THROWS_AS(parse_poly(""), ParseError);
}

TEST_CASE("property: parse(print(p)) == p for 1000 random polynomials") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 1000; ++k) {
    const HarmonicPoly p = random_poly(rng);
    const std::string text = p.to_string();
    REQUIRE_MESSAGE(parse_poly(text) == p, text);
    CHECK(poly_from_json<HarmonicVars>(to_json(p)) == p);
  }
}

TEST_CASE("property: ring axioms and exact evaluation") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> small(-3, 3);
  for (int k = 0; k < 200; ++k) {
    const HarmonicPoly a = random_poly(rng, 4, 3), b = random_poly(rng, 4, 3), c = random_poly(rng, 4, 3);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
    const std::array<GaussRational, 4> x{GaussRational(small(rng)), GaussRational(Rational(small(rng), 2)),
                                         GaussRational(Rational(1), Rational(small(rng))),
                                         GaussRational(small(rng))};
    CHECK((a * b).evaluate_exact(x) == a.evaluate_exact(x) * b.evaluate_exact(x));
    const std::array<Complex, 4> xd{x[0].to_complex(), x[1].to_complex(), x[2].to_complex(), x[3].to_complex()};
    const Complex exact = a.evaluate_exact(x).to_complex();
    CHECK(std::abs(a.evaluate(xd) - exact) < 1e-9 * (1 + std::abs(exact)));
  }
}

TEST_CASE("derivatives and powers") {
  const HarmonicPoly p = parse_poly("z^3*wb + 2*z");
  CHECK(p.derivative(0) == parse_poly("3*z^2*wb + 2"));
  CHECK(p.derivative(1).is_zero());
  CHECK(parse_poly("z+1").pow(3) == parse_poly("z^3 + 3*z^2 + 3*z + 1"));
}

TEST_CASE("json uses big integers as strings when needed") {
  const HarmonicPoly big = parse_poly("z").pow(1) * GaussRational(Rational("123456789012345678901234567890"));
  const auto j = to_json(big);
  CHECK(poly_from_json<HarmonicVars>(j) == big);
}
