#pragma once

#include <cstddef>
#include <vector>

#include "nilwalk/group_law.hpp"
#include "nilwalk/polynomial.hpp"
#include "nilwalk/report.hpp"

namespace nilwalk {

inline constexpr std::size_t kDefaultMonomialBudget = 1'000'000;

// Coordinates of x_1 * ... * x_N as polynomials in the variables x_k^{(i,j)}
// (SeqVariable{k, coord}), split into the linear sum and the remainder P_N.
struct ProductPolynomials {
  int length = 0;
  std::vector<Polynomial> full;
  std::vector<Polynomial> nonlinear;
  std::size_t monomials() const;
};

// Incremental symbolic product: Pi_N = Pi_{N-1} * x_N.
class ProductExpander {
 public:
  explicit ProductExpander(const GroupLaw& law, std::size_t budget = kDefaultMonomialBudget);

  int length() const { return length_; }
  // Throws ResourceError when the stored monomial count exceeds the budget.
  void extend_to(int n);
  ProductPolynomials snapshot() const;

 private:
  const GroupLaw* law_;
  std::size_t budget_;
  int length_ = 0;
  std::vector<Polynomial> current_;
};

// Throws std::invalid_argument for n < 1, ResourceError past the budget.
ProductPolynomials expand_product(const GroupLaw& law, int n,
                                  std::size_t budget = kDefaultMonomialBudget);

// Degree bound, stability from N to M, and invariance (including that every
// index placement of a type class is present) for the remainder polynomials.
LemmaReport check_product_lemma(const GradedBasis& basis, const ProductPolynomials& shorter,
                                const ProductPolynomials& longer);

// Invariance alone for one polynomial in sequences of length n. Each violation
// names the offending type class.
std::vector<std::string> invariance_violations(const Polynomial& p, int n, const GradedBasis& basis);

}  // namespace nilwalk
