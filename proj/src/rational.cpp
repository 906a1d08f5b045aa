#include "anisogup/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace anisogup {

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '-' || text[pos] == '+') {
    neg = text[pos] == '-';
    ++pos;
  }
  std::string num, den;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) num += text[pos++];
  if (num.empty()) return std::nullopt;
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) den += text[pos++];
    if (den.empty()) return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  Integer n(num);
  Integer d = den.empty() ? Integer(1) : Integer(den);
  if (d == 0) return std::nullopt;
  Rational r(n, d);
  if (neg) r = -r;
  return r;
}

Rational binomial(const Rational& a, unsigned k) {
  Rational acc(1);
  for (unsigned j = 0; j < k; ++j) {
    acc *= (a - Rational(j));
    acc /= Rational(j + 1);
  }
  return acc;
}

Rational pow_rational(const Rational& base, int exp) {
  if (exp == 0) return Rational(1);
  if (base == 0 && exp < 0) throw std::domain_error("pow_rational: 0 to negative power");
  Rational b = exp > 0 ? base : Rational(1) / base;
  int n = exp > 0 ? exp : -exp;
  Rational acc(1);
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

}  // namespace anisogup
