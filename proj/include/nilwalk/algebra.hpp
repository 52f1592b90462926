#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilwalk/errors.hpp"
#include "nilwalk/lie_vector.hpp"
#include "nilwalk/rational.hpp"

namespace nilwalk {

// Basis label X_{level,index}, both 1-based.
struct Label {
  int level = 1;
  int index = 1;
  auto operator<=>(const Label&) const = default;
};

std::string to_string(const Label& l);

// Graded basis of a nilpotent Lie algebra. Coordinates are ordered
// lexicographically by label, so level-1 coordinates come first.
class GradedBasis {
 public:
  GradedBasis() = default;
  explicit GradedBasis(std::vector<int> dims);

  int step() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(int level) const { return dims_.at(level - 1); }
  int total_dim() const { return static_cast<int>(labels_.size()); }
  int homogeneous_dim() const { return homogeneous_dim_; }

  const std::vector<Label>& labels() const { return labels_; }
  const Label& label(int coord) const { return labels_.at(coord); }
  int level_of(int coord) const { return labels_.at(coord).level; }
  int index_of(const Label& l) const;
  bool contains(const Label& l) const;

  // Half-open coordinate range [first, second) of a level.
  std::pair<int, int> level_range(int level) const;

  bool operator==(const GradedBasis&) const = default;

 private:
  std::vector<int> dims_;
  std::vector<Label> labels_;
  std::vector<int> offsets_;
  int homogeneous_dim_ = 0;
};

// Dense bracket tensor: [e_a, e_b] = sum_c c(a,b,c) e_c.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int dim);

  int dim() const { return dim_; }
  const Rational& at(int a, int b, int c) const;
  void set(int a, int b, int c, Rational value);

  // Sets [e_a, e_b] = v and [e_b, e_a] = -v.
  void set_antisymmetric(int a, int b, const std::vector<std::pair<int, Rational>>& v);

  bool operator==(const StructureConstants&) const = default;

 private:
  std::size_t offset(int a, int b, int c) const;
  int dim_ = 0;
  std::vector<Rational> data_;
};

struct AxiomViolation {
  std::string axiom;  // "antisymmetry", "grading" or "jacobi"
  std::vector<Label> witness;
  std::string detail;
};

struct ValidationReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Throws StructuralError when the tensor does not match the basis.
ValidationReport validate_algebra(const GradedBasis& basis, const StructureConstants& constants);

// A validated graded nilpotent Lie algebra. Immutable after construction.
class LieAlgebra {
 public:
  struct Term {
    int a;
    int b;
    int c;
    Rational coef;
    double coef_d;
  };

  // Throws MathError if validate_algebra reports a violation.
  LieAlgebra(std::string name, GradedBasis basis, StructureConstants constants);

  const std::string& name() const { return name_; }
  const GradedBasis& basis() const { return basis_; }
  const StructureConstants& constants() const { return constants_; }
  const std::vector<Term>& terms() const { return terms_; }
  int dim() const { return basis_.total_dim(); }
  int step() const { return basis_.step(); }
  bool is_abelian() const { return terms_.empty(); }

  // Coefficient of e_c in [e_a, e_b] restricted to the level of c.
  Rational projected_bracket(int a, int b, int c) const { return constants_.at(a, b, c); }

 private:
  std::string name_;
  GradedBasis basis_;
  StructureConstants constants_;
  std::vector<Term> terms_;
};

namespace detail {
template <class S>
void add_scaled_product(S& out, const Rational& c, double cd, const S& x, const S& y) {
  if constexpr (std::is_same_v<S, double>) {
    out += cd * x * y;
  } else {
    out += (x * y) * c;
  }
}
}  // namespace detail

template <class S>
void check_dim(const LieAlgebra& g, const LieVector<S>& x) {
  if (x.size() != g.dim())
    throw StructuralError("vector of dimension " + std::to_string(x.size()) +
                          " does not belong to algebra " + g.name());
}

// Lie bracket via the structure constants.
template <class S>
LieVector<S> bracket(const LieAlgebra& g, const LieVector<S>& x, const LieVector<S>& y) {
  check_dim(g, x);
  check_dim(g, y);
  LieVector<S> out = LieVector<S>::zero(g.dim());
  for (const auto& t : g.terms()) {
    if (is_zero(x[t.a]) || is_zero(y[t.b])) continue;
    detail::add_scaled_product(out[t.c], t.coef, t.coef_d, x[t.a], y[t.b]);
  }
  return out;
}

// Multiplies the level-n slice by r^n.
template <class S>
LieVector<S> dilate(const GradedBasis& basis, const S& r, const LieVector<S>& x) {
  if (!(r > 0)) throw std::invalid_argument("dilation factor must be positive");
  if (x.size() != basis.total_dim()) throw StructuralError("dilate: dimension mismatch");
  LieVector<S> out = x;
  S power = r;
  for (int level = 1; level <= basis.step(); ++level) {
    auto [lo, hi] = basis.level_range(level);
    for (int c = lo; c < hi; ++c) out[c] *= power;
    power *= r;
  }
  return out;
}

// Level-n slice x^{(n)}.
template <class S>
std::vector<S> level_slice(const GradedBasis& basis, const LieVector<S>& x, int level) {
  auto [lo, hi] = basis.level_range(level);
  return std::vector<S>(x.coords().begin() + lo, x.coords().begin() + hi);
}

}  // namespace nilwalk
