#include "nilwalk/algebra.hpp"

#include <numeric>
#include <sstream>

namespace nilwalk {

std::string to_string(const Label& l) {
  return "(" + std::to_string(l.level) + "," + std::to_string(l.index) + ")";
}

GradedBasis::GradedBasis(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw StructuralError("graded basis needs at least one level");
  for (int d : dims_)
    if (d < 1) throw StructuralError("every layer dimension must be positive");
  int offset = 0;
  for (int level = 1; level <= step(); ++level) {
    offsets_.push_back(offset);
    for (int j = 1; j <= dims_[level - 1]; ++j) labels_.push_back({level, j});
    offset += dims_[level - 1];
    homogeneous_dim_ += level * dims_[level - 1];
  }
  offsets_.push_back(offset);
}

bool GradedBasis::contains(const Label& l) const {
  return l.level >= 1 && l.level <= step() && l.index >= 1 && l.index <= dims_[l.level - 1];
}

int GradedBasis::index_of(const Label& l) const {
  if (!contains(l)) throw StructuralError("label " + to_string(l) + " out of range");
  return offsets_[l.level - 1] + l.index - 1;
}

std::pair<int, int> GradedBasis::level_range(int level) const {
  if (level < 1 || level > step())
    throw StructuralError("level " + std::to_string(level) + " does not exist");
  return {offsets_[level - 1], offsets_[level]};
}

StructureConstants::StructureConstants(int dim)
    : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim) {}

std::size_t StructureConstants::offset(int a, int b, int c) const {
  if (a < 0 || b < 0 || c < 0 || a >= dim_ || b >= dim_ || c >= dim_)
    throw StructuralError("structure constant index out of range");
  return (static_cast<std::size_t>(a) * dim_ + b) * dim_ + c;
}

const Rational& StructureConstants::at(int a, int b, int c) const { return data_[offset(a, b, c)]; }

void StructureConstants::set(int a, int b, int c, Rational value) {
  data_[offset(a, b, c)] = std::move(value);
}

void StructureConstants::set_antisymmetric(int a, int b,
                                           const std::vector<std::pair<int, Rational>>& v) {
  for (int c = 0; c < dim_; ++c) {
    set(a, b, c, 0);
    set(b, a, c, 0);
  }
  for (const auto& [c, coef] : v) {
    set(a, b, c, coef);
    set(b, a, c, -coef);
  }
}

ValidationReport validate_algebra(const GradedBasis& basis, const StructureConstants& k) {
  const int q = basis.total_dim();
  if (k.dim() != q)
    throw StructuralError("structure constants of dimension " + std::to_string(k.dim()) +
                          " for a basis of dimension " + std::to_string(q));
  ValidationReport report;
  const auto& L = basis.labels();

  for (int a = 0; a < q; ++a)
    for (int b = a; b < q; ++b)
      for (int c = 0; c < q; ++c)
        if (k.at(a, b, c) != -k.at(b, a, c)) {
          report.violations.push_back({"antisymmetry", {L[a], L[b]},
                                       "coefficient on " + to_string(L[c]) + " is " +
                                           to_string(k.at(a, b, c)) + " vs " +
                                           to_string(k.at(b, a, c))});
          break;
        }

  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        if (sgn(k.at(a, b, c)) != 0 && L[c].level < L[a].level + L[b].level) {
          report.violations.push_back({"grading", {L[a], L[b], L[c]},
                                       "bracket of levels " + std::to_string(L[a].level) + "," +
                                           std::to_string(L[b].level) + " has support on level " +
                                           std::to_string(L[c].level)});
        }

  // [[a,b],c] + [[b,c],a] + [[c,a],b] = 0 coordinatewise.
  auto nested = [&](int a, int b, int c, int out) {
    Rational s = 0;
    for (int m = 0; m < q; ++m)
      if (sgn(k.at(a, b, m)) != 0) s += k.at(a, b, m) * k.at(m, c, out);
    return s;
  };
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      for (int c = b + 1; c < q; ++c)
        for (int out = 0; out < q; ++out) {
          Rational j = nested(a, b, c, out) + nested(b, c, a, out) + nested(c, a, b, out);
          if (sgn(j) != 0) {
            report.violations.push_back({"jacobi", {L[a], L[b], L[c]},
                                         "cyclic sum has coefficient " + to_string(j) + " on " +
                                             to_string(L[out])});
            break;
          }
        }
  return report;
}

LieAlgebra::LieAlgebra(std::string name, GradedBasis basis, StructureConstants constants)
    : name_(std::move(name)), basis_(std::move(basis)), constants_(std::move(constants)) {
  auto report = validate_algebra(basis_, constants_);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    std::ostringstream msg;
    msg << "algebra " << name_ << " violates " << v.axiom << " at";
    for (const auto& l : v.witness) msg << ' ' << to_string(l);
    throw MathError(msg.str());
  }
  const int q = basis_.total_dim();
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c)
        if (sgn(constants_.at(a, b, c)) != 0)
          terms_.push_back({a, b, c, constants_.at(a, b, c), to_double(constants_.at(a, b, c))});
}

}  // namespace nilwalk
