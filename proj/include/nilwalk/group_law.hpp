#pragma once

#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/algebra.hpp"
#include "nilwalk/polynomial.hpp"

namespace nilwalk {

// In the group-law polynomials x is sequence slot 1 and y is slot 2.
inline constexpr int kLeftSlot = 1;
inline constexpr int kRightSlot = 2;

// Dynkin coefficients of the right-nested brackets [w1,[w2,...,w_m]] in
// log(exp X exp Y), for words w over {X=0, Y=1} of length <= max_length.
struct DynkinTerm {
  std::vector<int> word;
  Rational coefficient;
};
std::vector<DynkinTerm> dynkin_series(int max_length);

// z = x * y in exponential coordinates, one polynomial per output coordinate
// in the 2q variables x^{(i,l)}, y^{(i,l)}.
class GroupLaw {
 public:
  explicit GroupLaw(const LieAlgebra& algebra);

  const LieAlgebra& algebra() const { return *algebra_; }
  const GradedBasis& basis() const { return algebra_->basis(); }
  int dim() const { return algebra_->dim(); }
  const std::vector<Polynomial>& polynomials() const { return table_; }
  const Polynomial& polynomial(int coord) const { return table_.at(coord); }

  ExactVector multiply(const ExactVector& x, const ExactVector& y) const;
  FloatVector multiply(const FloatVector& x, const FloatVector& y) const;

  // Allocation-free float product: out = x * y. out may not alias x or y.
  void multiply_into(std::span<const double> x, std::span<const double> y,
                     std::span<double> out) const;

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const LieAlgebra> algebra_;
  std::vector<Polynomial> table_;
  CompiledPolynomialMap compiled_;
};

inline GroupLaw build_group_law(const LieAlgebra& algebra) { return GroupLaw(algebra); }

// Left fold x_1 * x_2 * ... * x_N. Throws std::invalid_argument when empty.
template <class S>
LieVector<S> product(const GroupLaw& law, std::span<const LieVector<S>> xs) {
  if (xs.empty()) throw std::invalid_argument("product of an empty sequence");
  LieVector<S> acc = xs.front();
  check_dim(law.algebra(), acc);
  for (std::size_t k = 1; k < xs.size(); ++k) acc = law.multiply(acc, xs[k]);
  return acc;
}

template <class S>
LieVector<S> product(const GroupLaw& law, const std::vector<LieVector<S>>& xs) {
  return product<S>(law, std::span<const LieVector<S>>(xs));
}

// Translation maps x -> log g * x * log h and their inverse.
struct TranslationPolynomials {
  std::vector<Polynomial> p;  // in variables x (slot 1)
  std::vector<Polynomial> q;  // compositional inverse, in variables x' (slot 1)
  Rational height;            // max absolute coefficient of p
};

TranslationPolynomials translate_polynomials(const GroupLaw& law, const ExactVector& g,
                                             const ExactVector& h);

// Composition f(g(x)) of polynomial maps in slot-1 variables.
std::vector<Polynomial> compose_maps(const std::vector<Polynomial>& outer,
                                     const std::vector<Polynomial>& inner);

// Identity polynomial map in slot-1 variables.
std::vector<Polynomial> identity_map(int dim);

}  // namespace nilwalk
