#include "nilwalk/rational.hpp"

#include <stdexcept>
#include <string>

namespace nilwalk {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto dot = s.find('.');
  const auto exp = s.find_first_of("eE");
  if (dot == std::string::npos && exp == std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
  }
  // Decimal: mantissa digits over a power of ten.
  std::string mantissa = exp == std::string::npos ? s : s.substr(0, exp);
  long exponent = exp == std::string::npos ? 0 : std::stol(s.substr(exp + 1));
  const auto d = mantissa.find('.');
  if (d != std::string::npos) {
    exponent -= static_cast<long>(mantissa.size() - d - 1);
    mantissa.erase(d, 1);
  }
  mpz_class num;
  if (num.set_str(mantissa, 10) != 0) throw std::invalid_argument("bad decimal literal: " + s);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

Rational rational_gcd(const Rational& a, const Rational& b) {
  // gcd(p/q, r/s) = gcd(p s, r q) / (q s)
  mpz_class num, x = abs(a).get_num() * b.get_den(), y = abs(b).get_num() * a.get_den();
  mpz_gcd(num.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  Rational g(num, a.get_den() * b.get_den());
  g.canonicalize();
  return g;
}

}  // namespace nilwalk
