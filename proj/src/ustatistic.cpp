#include "nilwalk/ustatistic.hpp"

#include <algorithm>
#include <map>

#include "nilwalk/errors.hpp"
#include "nilwalk/product_expansion.hpp"

namespace nilwalk {

int UStatisticSpec::homogeneous_degree(const GradedBasis& basis) const {
  int d = 0;
  for (const auto& block : blocks)
    for (const auto& [c, e] : block) d += basis.level_of(c) * e;
  return d;
}

Monomial UStatisticSpec::initial_monomial() const {
  std::vector<VarPower> f;
  for (int k = 0; k < order(); ++k)
    for (const auto& [c, e] : blocks[k]) f.push_back({{k + 1, c}, e});
  return Monomial::from_factors(std::move(f));
}

UStatisticSpec UStatisticSpec::from_monomial(const Monomial& type_class) {
  UStatisticSpec spec;
  const auto idx = type_class.index_set();
  spec.blocks.resize(idx.size());
  for (const auto& [v, e] : type_class.factors()) {
    const auto pos = std::lower_bound(idx.begin(), idx.end(), v.seq) - idx.begin();
    spec.blocks[pos].push_back({v.coord, e});
  }
  return spec;
}

void validate_ustatistic(const UStatisticSpec& spec, const GradedBasis& basis) {
  for (const auto& block : spec.blocks) {
    if (block.empty()) throw StructuralError("U-statistic block must be nonempty");
    for (std::size_t i = 0; i < block.size(); ++i) {
      const auto& [c, e] = block[i];
      if (c < 0 || c >= basis.total_dim()) throw StructuralError("U-statistic coordinate out of range");
      if (e < 1) throw StructuralError("U-statistic exponents must be positive");
      if (i > 0 && block[i - 1].first >= c)
        throw StructuralError("U-statistic block coordinates must be increasing");
    }
  }
}

UDecomposition u_decompose(const Polynomial& p, int n, const GradedBasis& basis) {
  auto violations = invariance_violations(p, n, basis);
  if (!violations.empty()) throw MathError("cannot decompose: " + violations.front());
  std::map<Monomial, Rational> classes;
  for (const auto& [m, c] : p.terms()) classes.emplace(m.type_class(), c);
  UDecomposition d;
  d.l1_norm = 0;
  for (const auto& [type, c] : classes) {
    d.terms.push_back({UStatisticSpec::from_monomial(type), c});
    d.l1_norm += abs(c);
  }
  return d;
}

Polynomial u_expand(const UStatisticSpec& spec, int n) {
  const int r = spec.order();
  Polynomial out;
  if (r == 0) return Polynomial(1);
  if (n < r) return out;
  std::vector<int> idx(r);
  for (int k = 0; k < r; ++k) idx[k] = k + 1;
  while (true) {
    std::vector<VarPower> f;
    for (int k = 0; k < r; ++k)
      for (const auto& [c, e] : spec.blocks[k]) f.push_back({{idx[k], c}, e});
    out.add_term(Monomial::from_factors(std::move(f)), 1);
    int k = r - 1;
    while (k >= 0 && idx[k] == n - (r - 1 - k)) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Polynomial u_recombine(const UDecomposition& d, int n) {
  Polynomial out;
  for (const auto& [spec, c] : d.terms) out += u_expand(spec, n) * c;
  return out;
}

nlohmann::json ustatistic_to_json(const UStatisticSpec& spec, const GradedBasis& basis) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : spec.blocks) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& [c, e] : block) {
      const auto& l = basis.label(c);
      b.push_back({{"label", {l.level, l.index}}, {"exp", e}});
    }
    blocks.push_back(b);
  }
  return blocks;
}

UStatisticSpec ustatistic_from_json(const nlohmann::json& j, const GradedBasis& basis) {
  if (!j.is_array()) throw StructuralError("U-statistic must be a list of blocks");
  UStatisticSpec spec;
  for (const auto& b : j) {
    std::vector<std::pair<int, int>> block;
    for (const auto& f : b) {
      const auto& l = f.at("label");
      block.push_back({basis.index_of({l.at(0).get<int>(), l.at(1).get<int>()}), f.value("exp", 1)});
    }
    std::sort(block.begin(), block.end());
    spec.blocks.push_back(std::move(block));
  }
  validate_ustatistic(spec, basis);
  return spec;
}

}  // namespace nilwalk
