#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace cluscov {

/// Exact arbitrary-precision rational; all model quantities use this type.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "a", "-a", "a/b" or a plain decimal like "1.25" (converted
/// exactly with a base-10 denominator). Throws std::invalid_argument on
/// anything else, including b = 0 and exponent notation.
inline Rational parse_rational(const std::string& text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational: '" + text + "'");
  };
  if (text.empty()) return fail();
  std::string s = text;
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = (s[pos] == '-');
    ++pos;
  }
  auto digits = [&](std::size_t begin, std::size_t end) -> BigInt {
    if (begin == end) return BigInt(-1);
    BigInt v = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (s[i] < '0' || s[i] > '9') return BigInt(-1);
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  std::size_t slash = s.find('/', pos);
  std::size_t dot = s.find('.', pos);
  if (slash != std::string::npos) {
    if (dot != std::string::npos) return fail();
    BigInt num = digits(pos, slash);
    BigInt den = digits(slash + 1, s.size());
    if (num < 0 || den <= 0) return fail();
    Rational r(num, den);
    return negative ? -r : r;
  }
  if (dot != std::string::npos) {
    BigInt whole = digits(pos, dot);
    BigInt frac = digits(dot + 1, s.size());
    if (whole < 0 || frac < 0) return fail();
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    Rational r = Rational(whole) + Rational(frac, den);
    return negative ? -r : r;
  }
  BigInt v = digits(pos, s.size());
  if (v < 0) return fail();
  return negative ? Rational(-v) : Rational(v);
}

/// "a" for integers, "a/b" otherwise.
inline std::string rational_to_string(const Rational& r) {
  return r.str();
}

inline double rational_to_double(const Rational& r) {
  return static_cast<double>(r);
}

}  // namespace cluscov
