#include "nilwalk/product_expansion.hpp"

#include <map>
#include <stdexcept>

#include "nilwalk/errors.hpp"

namespace nilwalk {

std::size_t ProductPolynomials::monomials() const {
  std::size_t n = 0;
  for (const auto& p : full) n += p.size();
  return n;
}

ProductExpander::ProductExpander(const GroupLaw& law, std::size_t budget)
    : law_(&law), budget_(budget) {}

void ProductExpander::extend_to(int n) {
  const int q = law_->dim();
  while (length_ < n) {
    const int k = length_ + 1;
    std::vector<Polynomial> next;
    next.reserve(q);
    std::vector<Polynomial> fresh;
    for (int c = 0; c < q; ++c) fresh.push_back(Polynomial::variable({k, c}));
    std::size_t stored = 0;
    for (const auto& p : law_->polynomials()) {
      if (length_ == 0) {
        next = fresh;
        break;
      }
      next.push_back(substitute(p, [&](SeqVariable v) -> const Polynomial* {
        return v.seq == kLeftSlot ? &current_[v.coord] : &fresh[v.coord];
      }));
      stored += next.back().size();
      if (stored > budget_)
        throw ResourceError("product expansion at N=" + std::to_string(k) + " exceeds the budget of " +
                            std::to_string(budget_) + " monomials");
    }
    current_ = std::move(next);
    length_ = k;
  }
}

ProductPolynomials ProductExpander::snapshot() const {
  ProductPolynomials out;
  out.length = length_;
  out.full = current_;
  for (int c = 0; c < static_cast<int>(current_.size()); ++c) {
    Polynomial rest = current_[c];
    for (int k = 1; k <= length_; ++k) rest -= Polynomial::variable({k, c});
    out.nonlinear.push_back(std::move(rest));
  }
  return out;
}

ProductPolynomials expand_product(const GroupLaw& law, int n, std::size_t budget) {
  if (n < 1) throw std::invalid_argument("expand_product needs N >= 1");
  ProductExpander e(law, budget);
  e.extend_to(n);
  return e.snapshot();
}

namespace {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

std::vector<std::string> invariance_violations(const Polynomial& p, int n, const GradedBasis& basis) {
  struct ClassInfo {
    Rational coef;
    long count = 0;
    bool consistent = true;
  };
  std::map<Monomial, ClassInfo> classes;
  for (const auto& [m, c] : p.terms()) {
    auto [it, inserted] = classes.try_emplace(m.type_class());
    if (inserted) it->second.coef = c;
    else if (it->second.coef != c) it->second.consistent = false;
    ++it->second.count;
  }
  std::vector<std::string> out;
  for (const auto& [type, info] : classes) {
    const int r = static_cast<int>(type.index_set().size());
    if (!info.consistent)
      out.push_back("type " + to_string(Polynomial::monomial(type, 1), basis) +
                    " has unequal coefficients");
    else if (info.count != binomial(n, r))
      out.push_back("type " + to_string(Polynomial::monomial(type, 1), basis) + " has " +
                    std::to_string(info.count) + " of " + std::to_string(binomial(n, r)) +
                    " placements");
  }
  return out;
}

LemmaReport check_product_lemma(const GradedBasis& basis, const ProductPolynomials& shorter,
                                const ProductPolynomials& longer) {
  LemmaReport report;
  report.check = "product_polynomials";
  report.parameters = {{"N", shorter.length}, {"M", longer.length}};
  if (shorter.length >= longer.length)
    throw std::invalid_argument("check_product_lemma needs N < M");
  const int q = basis.total_dim();
  for (int c = 0; c < q; ++c) {
    const int level = basis.level_of(c);
    const std::string where = "coordinate " + to_string(basis.label(c));
    for (const auto* poly : {&shorter.nonlinear[c], &longer.nonlinear[c]})
      for (const auto& [m, coef] : poly->terms())
        if (m.homogeneous_degree(basis) > level)
          report.fail("degree bound: " + where + " monomial " +
                      to_string(Polynomial::monomial(m, coef), basis));

    for (const auto& [m, coef] : shorter.nonlinear[c].terms())
      if (longer.nonlinear[c].coefficient(m) != coef)
        report.fail("stability: " + where + " monomial " +
                    to_string(Polynomial::monomial(m, coef), basis) + " changes from N to M");
    for (const auto& [m, coef] : longer.nonlinear[c].terms())
      if (m.max_seq() <= shorter.length && shorter.nonlinear[c].coefficient(m) != coef)
        report.fail("stability: " + where + " monomial " +
                    to_string(Polynomial::monomial(m, coef), basis) + " missing at N");

    for (const auto* poly : {&shorter, &longer})
      for (auto& v : invariance_violations(poly->nonlinear[c], poly->length, basis))
        report.fail("invariance: " + where + " at N=" + std::to_string(poly->length) + ": " + v);
  }
  return report;
}

}  // namespace nilwalk
