#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace anisogup {

// Exact arbitrary-precision rational; every coefficient in the engine is one
// of these. No floating point enters any decision path.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Parses "n" or "n/d". Returns nullopt on malformed input or zero denominator.
std::optional<Rational> parse_rational(const std::string& text);

// Generalized binomial coefficient C(a, k) for rational a and k >= 0; used by
// the geometric expansion of inverse scalar atoms.
Rational binomial(const Rational& a, unsigned k);

Rational pow_rational(const Rational& base, int exp);

}  // namespace anisogup
