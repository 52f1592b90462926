#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/algebra.hpp"
#include "nilwalk/polynomial.hpp"

namespace nilwalk {

// Generalized U-statistic: sum over l_1 < ... < l_r of
// prod_k prod_{(c, e) in block k} x_{l_k}[c]^e.
struct UStatisticSpec {
  // Per block: (coordinate, positive exponent) pairs, coordinates increasing.
  std::vector<std::vector<std::pair<int, int>>> blocks;

  int order() const { return static_cast<int>(blocks.size()); }
  int homogeneous_degree(const GradedBasis& basis) const;
  Monomial initial_monomial() const;
  static UStatisticSpec from_monomial(const Monomial& type_class);
  bool operator==(const UStatisticSpec&) const = default;
};

// Throws StructuralError on empty blocks or bad exponents.
void validate_ustatistic(const UStatisticSpec& spec, const GradedBasis& basis);

struct UDecomposition {
  std::vector<std::pair<UStatisticSpec, Rational>> terms;
  Rational l1_norm;
};

// Exact decomposition of a polynomial in sequences of length n. Throws
// MathError if the polynomial is not invariant under type.
UDecomposition u_decompose(const Polynomial& p, int n, const GradedBasis& basis);

// The U-statistic as a polynomial in x_1..x_n.
Polynomial u_expand(const UStatisticSpec& spec, int n);
Polynomial u_recombine(const UDecomposition& d, int n);

nlohmann::json ustatistic_to_json(const UStatisticSpec& spec, const GradedBasis& basis);
UStatisticSpec ustatistic_from_json(const nlohmann::json& j, const GradedBasis& basis);

namespace detail {
// Neumaier-compensated accumulator for the float layer.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};
}  // namespace detail

// Dynamic program over the sequence, O(n r) block evaluations. Exact for
// Rational, compensated for double.
template <class S>
S u_evaluate(const UStatisticSpec& spec, std::span<const LieVector<S>> xs) {
  const int r = spec.order();
  if (r == 0) return S(1);
  auto block_value = [&](int j, const LieVector<S>& x) {
    S v(1);
    for (const auto& [c, e] : spec.blocks[j])
      for (int k = 0; k < e; ++k) v *= x[c];
    return v;
  };
  if constexpr (std::is_same_v<S, double>) {
    std::vector<detail::CompensatedSum> dp(r + 1);
    dp[0].sum = 1.0;
    for (const auto& x : xs)
      for (int j = r; j >= 1; --j) {
        const double prev = dp[j - 1].value();
        if (prev != 0.0) dp[j].add(prev * block_value(j - 1, x));
      }
    return dp[r].value();
  } else {
    std::vector<S> dp(r + 1, S(0));
    dp[0] = S(1);
    for (const auto& x : xs)
      for (int j = r; j >= 1; --j)
        if (!is_zero(dp[j - 1])) dp[j] += dp[j - 1] * block_value(j - 1, x);
    return dp[r];
  }
}

template <class S>
S u_evaluate(const UStatisticSpec& spec, const std::vector<LieVector<S>>& xs) {
  return u_evaluate<S>(spec, std::span<const LieVector<S>>(xs));
}

}  // namespace nilwalk
