#pragma once

#include <random>

#include "nilwalk/lie_vector.hpp"

namespace nilwalk::testing {

// Small random rationals p/q with |p| <= 9, 1 <= q <= 6.
inline Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline ExactVector random_vector(std::mt19937_64& rng, int dim) {
  std::vector<Rational> c(dim);
  for (auto& x : c) x = random_rational(rng);
  return ExactVector(std::move(c));
}

}  // namespace nilwalk::testing
