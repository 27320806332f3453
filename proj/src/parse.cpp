// Recursive-descent parser for the polynomial text format.

#include <cctype>
#include <optional>

#include "arlab/poly.hpp"

namespace arlab {

namespace {

constexpr int kMaxExponent = 64;

template <class Vars>
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SparsePoly<Vars> parse() {
    auto p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  using Poly = SparsePoly<Vars>;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  Poly expr() {
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Poly acc = term();
    if (negate) acc = -acc;
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Poly term() {
    Poly acc = power();
    for (;;) {
      if (accept('*')) {
        acc = acc * power();
      } else if (peek('/')) {
        const std::size_t at = pos_;
        ++pos_;
        Poly d = power();
        if (d.size() != 1 || d.terms().begin()->first != Exponents{0, 0, 0, 0}) {
          throw ParseError("division by a non-constant", at);
        }
        acc = acc * (GaussRational(1) / d.terms().begin()->second);
      } else {
        return acc;
      }
    }
  }

  Poly power() {
    Poly base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      const auto k = digits();
      if (!k) fail("expected integer exponent");
      if (*k > kMaxExponent) throw ParseError("exponent too large", at);
      return base.pow(static_cast<int>(*k));
    }
    return base;
  }

  std::optional<long long> digits() {
    const std::size_t start = pos_;
    long long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v > 1'000'000'000'000'000LL) fail("integer literal too long");
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return v;
  }

  bool at_identifier_char() const {
    return pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_');
  }

  Poly number() {
    const std::size_t start = pos_;
    Rational value(*digits());
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      throw ParseError("non-rational coefficient (write it as p/q)", start);
    }
    if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      const std::size_t den_at = pos_;
      const long long den = *digits();
      if (den == 0) throw ParseError("zero denominator", den_at);
      value /= den;
    }
    GaussRational c(value);
    if (pos_ < text_.size() && text_[pos_] == 'i' &&
        !(pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      c = GaussRational(Rational(0), value);
    }
    if (at_identifier_char()) fail("missing '*' before identifier");
    return Poly::constant(c);
  }

  Poly primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch))) return number();
    if (ch == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (ch == '.') fail("non-rational coefficient (write it as p/q)");
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::size_t start = pos_;
      while (at_identifier_char()) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "i") return Poly::constant(GaussRational::imaginary_unit());
      for (std::size_t k = 0; k < 4; ++k) {
        if (name == Vars::names[k]) return Poly::variable(static_cast<int>(k));
      }
      throw ParseError("unknown symbol '" + std::string(name) + "'", start);
    }
    fail("unexpected character '" + std::string(1, ch) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

HarmonicPoly parse_poly(std::string_view text) { return Parser<HarmonicVars>(text).parse(); }

HolomorphicPoly parse_holomorphic_poly(std::string_view text) {
  return Parser<HolomorphicVars>(text).parse();
}

}  // namespace arlab
