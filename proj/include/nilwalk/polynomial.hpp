#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/algebra.hpp"
#include "nilwalk/rational.hpp"

namespace nilwalk {

// Variable x_seq^{coord}: seq is the 1-based position in a sequence, coord
// the 0-based coordinate index in the graded basis.
struct SeqVariable {
  int seq = 1;
  int coord = 0;
  auto operator<=>(const SeqVariable&) const = default;
};

using VarPower = std::pair<SeqVariable, int>;

// Product of variable powers, factors sorted by (seq, coord).
class Monomial {
 public:
  Monomial() = default;
  static Monomial variable(SeqVariable v, int exponent = 1);
  static Monomial from_factors(std::vector<VarPower> factors);

  const std::vector<VarPower>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }
  int degree() const;
  int homogeneous_degree(const GradedBasis& basis) const;
  int exponent(SeqVariable v) const;

  // Distinct sequence indices, increasing.
  std::vector<int> index_set() const;
  int max_seq() const;

  // Initial monomial of the same type: indices compressed to 1..r in order.
  Monomial type_class() const;

  Monomial operator*(const Monomial& o) const;

  // Graded lexicographic: total degree first, then factor lists.
  std::strong_ordering operator<=>(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return factors_ == o.factors_; }

 private:
  std::vector<VarPower> factors_;
};

// Sparse multivariate polynomial with exact coefficients; zero coefficients
// are never stored, so the representation is canonical.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational>;

  Polynomial() = default;
  explicit Polynomial(const Rational& c);
  explicit Polynomial(int c) : Polynomial(Rational(c)) {}
  static Polynomial variable(SeqVariable v);
  static Polynomial monomial(const Monomial& m, const Rational& c);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const { return coefficient(Monomial()); }

  void add_term(const Monomial& m, const Rational& c);

  int degree() const;
  int max_seq() const;
  Rational height() const;    // max absolute coefficient
  Rational l1_norm() const;   // sum of absolute coefficients

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

  // Evaluates with value(SeqVariable) -> S.
  template <class S, class F>
  S evaluate(F&& value) const {
    S total(0);
    for (const auto& [m, c] : terms_) {
      S term = scalar_from_rational<S>(c);
      for (const auto& [v, e] : m.factors()) {
        const S x = value(v);
        for (int k = 0; k < e; ++k) term *= x;
      }
      total += term;
    }
    return total;
  }

  template <class S>
  static S scalar_from_rational(const Rational& c) {
    if constexpr (std::is_same_v<S, double>) {
      return to_double(c);
    } else {
      return S(c);
    }
  }

 private:
  TermMap terms_;
};

inline bool is_zero(const Polynomial& p) { return p.is_zero(); }

Polynomial pow(const Polynomial& p, int e);

// Replaces each variable v for which sub(v) is non-null by *sub(v).
using Substitution = std::function<const Polynomial*(SeqVariable)>;
Polynomial substitute(const Polynomial& p, const Substitution& sub);

// Renames variables; the map must be injective on the variables of p.
Polynomial rename(const Polynomial& p, const std::function<SeqVariable(SeqVariable)>& map);

std::string to_string(const Polynomial& p, const GradedBasis& basis);

// {monomial: [[{seq, label:[i,j]}, exp], ...], num, den} terms.
nlohmann::json polynomial_to_json(const Polynomial& p, const GradedBasis& basis);
Polynomial polynomial_from_json(const nlohmann::json& j, const GradedBasis& basis);
nlohmann::json rational_to_json_num(const Rational& r);

// Polynomial map compiled for fast double evaluation. Variables are mapped
// to dense input slots by a caller-supplied function.
class CompiledPolynomialMap {
 public:
  CompiledPolynomialMap() = default;
  CompiledPolynomialMap(const std::vector<Polynomial>& outputs,
                        const std::function<int(SeqVariable)>& slot_of);

  int outputs() const { return static_cast<int>(output_begin_.size()) - 1; }

  void evaluate(std::span<const double> inputs, std::span<double> out) const {
    for (int o = 0; o + 1 < static_cast<int>(output_begin_.size()); ++o) {
      double acc = 0.0;
      for (int t = output_begin_[o]; t < output_begin_[o + 1]; ++t) {
        const Term& term = terms_[t];
        double v = term.coef;
        for (int f = term.first; f < term.first + term.count; ++f) {
          const double x = inputs[factors_[f].slot];
          for (int k = 0; k < factors_[f].exponent; ++k) v *= x;
        }
        acc += v;
      }
      out[o] = acc;
    }
  }

 private:
  struct Term {
    double coef;
    int first;
    int count;
  };
  struct Factor {
    int slot;
    int exponent;
  };
  std::vector<int> output_begin_;
  std::vector<Term> terms_;
  std::vector<Factor> factors_;
};

}  // namespace nilwalk
