#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace nilwalk {

// Exact scalar of the symbolic layer.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p", "p/q" or a finite decimal such as "-0.25".
Rational parse_rational(std::string_view text);

// Exact binary value of a double.
inline Rational rational_from_double(double x) { return Rational(x); }

inline double to_double(const Rational& r) { return r.get_d(); }

std::string to_string(const Rational& r);

inline Rational abs(const Rational& r) { return ::abs(r); }

// gcd of two nonnegative rationals: largest g with a/g and b/g both integers.
Rational rational_gcd(const Rational& a, const Rational& b);

}  // namespace nilwalk
