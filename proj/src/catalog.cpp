#include "nilwalk/catalog.hpp"

#include <map>
#include <set>

#include "nilwalk/errors.hpp"

namespace nilwalk {
namespace {

using Bracket = std::vector<std::pair<int, Rational>>;

GroupCatalogEntry make_heisenberg3() {
  GradedBasis basis({2, 1});
  StructureConstants k(3);
  k.set_antisymmetric(0, 1, {{2, Rational(1)}});
  MatrixRepresentation rep;
  rep.basis_images = {ExactMatrix::unit(3, 0, 1), ExactMatrix::unit(3, 1, 2),
                      ExactMatrix::unit(3, 0, 2)};
  return {"heisenberg3", LieAlgebra("heisenberg3", basis, k), rep};
}

// Coordinates E12, E23, E34 | E13, E24 | E14.
GroupCatalogEntry make_ut4() {
  GradedBasis basis({3, 2, 1});
  StructureConstants k(6);
  k.set_antisymmetric(0, 1, {{3, Rational(1)}});   // [E12,E23] = E13
  k.set_antisymmetric(1, 2, {{4, Rational(1)}});   // [E23,E34] = E24
  k.set_antisymmetric(0, 4, {{5, Rational(1)}});   // [E12,E24] = E14
  k.set_antisymmetric(3, 2, {{5, Rational(1)}});   // [E13,E34] = E14
  MatrixRepresentation rep;
  rep.basis_images = {ExactMatrix::unit(4, 0, 1), ExactMatrix::unit(4, 1, 2),
                      ExactMatrix::unit(4, 2, 3), ExactMatrix::unit(4, 0, 2),
                      ExactMatrix::unit(4, 1, 3), ExactMatrix::unit(4, 0, 3)};
  return {"ut4", LieAlgebra("ut4", basis, k), rep};
}

// Left multiplication on the free associative algebra on two letters,
// truncated above word length 3. Words are indexed by length then binary value.
int word_index(int length, int value) { return (1 << length) - 1 + value; }

ExactMatrix left_letter(int letter) {
  ExactMatrix m(15);
  for (int len = 0; len < 3; ++len)
    for (int v = 0; v < (1 << len); ++v) {
      const int target = (letter << len) | v;
      m(word_index(len + 1, target), word_index(len, v)) = 1;
    }
  return m;
}

ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b) { return a * b - b * a; }

// Hall basis X1, X2, [X1,X2], [[X1,X2],X1], [[X1,X2],X2].
GroupCatalogEntry make_free2step3() {
  GradedBasis basis({2, 1, 2});
  StructureConstants k(5);
  k.set_antisymmetric(0, 1, {{2, Rational(1)}});
  k.set_antisymmetric(2, 0, {{3, Rational(1)}});
  k.set_antisymmetric(2, 1, {{4, Rational(1)}});
  const ExactMatrix a = left_letter(0), b = left_letter(1);
  const ExactMatrix ab = commutator(a, b);
  MatrixRepresentation rep;
  rep.basis_images = {a, b, ab, commutator(ab, a), commutator(ab, b)};
  return {"free2step3", LieAlgebra("free2step3", basis, k), rep};
}

Label parse_label(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw StructuralError("label must be a pair of integers, got " + j.dump());
  return {j[0].get<int>(), j[1].get<int>()};
}

Rational parse_coefficient(const nlohmann::json& out) {
  if (!out.contains("num")) throw StructuralError("bracket output missing num");
  const auto& num = out.at("num");
  Rational value = num.is_string() ? parse_rational(num.get<std::string>())
                                   : Rational(num.get<long>());
  if (out.contains("den")) {
    const long den = out.at("den").get<long>();
    if (den == 0) throw StructuralError("zero denominator in bracket coefficient");
    value /= den;
  }
  return value;
}

}  // namespace

std::vector<std::string> catalog_names() { return {"heisenberg3", "ut4", "free2step3"}; }

const GroupCatalogEntry& catalog_entry(const std::string& name) {
  static const std::map<std::string, GroupCatalogEntry> entries = [] {
    std::map<std::string, GroupCatalogEntry> m;
    for (auto e : {make_heisenberg3(), make_ut4(), make_free2step3()}) m.emplace(e.name, e);
    return m;
  }();
  auto it = entries.find(name);
  if (it == entries.end()) throw StructuralError("unknown group: " + name);
  return it->second;
}

LieAlgebra abelian_algebra(std::vector<int> dims) {
  GradedBasis basis(std::move(dims));
  return LieAlgebra("abelian", basis, StructureConstants(basis.total_dim()));
}

AlgebraDocument parse_algebra_document(const nlohmann::json& doc, std::string name) {
  if (!doc.is_object()) throw StructuralError("algebra document must be a JSON object");
  if (!doc.contains("dims")) throw StructuralError("algebra document missing dims");
  auto dims = doc.at("dims").get<std::vector<int>>();
  if (doc.contains("step") && doc.at("step").get<int>() != static_cast<int>(dims.size()))
    throw StructuralError("step does not match the number of layers in dims");
  if (doc.contains("name")) name = doc.at("name").get<std::string>();
  GradedBasis basis(dims);
  StructureConstants k(basis.total_dim());

  struct Entry {
    int a, b;
    Bracket out;
  };
  std::vector<Entry> entries;
  std::set<std::pair<int, int>> listed;
  for (const auto& br : doc.value("brackets", nlohmann::json::array())) {
    Entry e;
    e.a = basis.index_of(parse_label(br.at("left")));
    e.b = basis.index_of(parse_label(br.at("right")));
    for (const auto& out : br.value("out", nlohmann::json::array()))
      e.out.emplace_back(basis.index_of(parse_label(out.at("label"))), parse_coefficient(out));
    if (!listed.insert({e.a, e.b}).second)
      throw StructuralError("bracket listed twice for " + to_string(basis.label(e.a)) + "," +
                            to_string(basis.label(e.b)));
    entries.push_back(std::move(e));
  }
  for (const auto& e : entries)
    for (const auto& [c, v] : e.out) k.set(e.a, e.b, c, k.at(e.a, e.b, c) + v);
  for (const auto& e : entries) {
    if (listed.count({e.b, e.a})) continue;
    for (const auto& [c, v] : e.out) k.set(e.b, e.a, c, k.at(e.b, e.a, c) - v);
  }
  return {std::move(name), std::move(basis), std::move(k)};
}

StructureConstants constants_from_representation(const GradedBasis& basis,
                                                 const MatrixRepresentation& rep) {
  const int q = basis.total_dim();
  if (static_cast<int>(rep.basis_images.size()) != q)
    throw StructuralError("representation does not match basis dimension");
  const int n = rep.matrix_dim();
  std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(n) * n, std::vector<Rational>(q));
  for (int c = 0; c < q; ++c)
    for (int e = 0; e < n * n; ++e) rows[e][c] = rep.basis_images[c].entries()[e];
  StructureConstants k(q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      const ExactMatrix m = commutator(rep.basis_images[a], rep.basis_images[b]);
      bool ok = false;
      auto x = solve_exact(rows, m.entries(), ok);
      if (!ok) throw MathError("commutator of basis images leaves the span");
      for (int c = 0; c < q; ++c) k.set(a, b, c, x[c]);
    }
  return k;
}

nlohmann::json algebra_to_json(const LieAlgebra& g) {
  const auto& basis = g.basis();
  nlohmann::json brackets = nlohmann::json::array();
  const int q = g.dim();
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) {
      nlohmann::json out = nlohmann::json::array();
      for (int c = 0; c < q; ++c) {
        const Rational& v = g.constants().at(a, b, c);
        if (sgn(v) == 0) continue;
        const auto& l = basis.label(c);
        out.push_back({{"label", {l.level, l.index}},
                       {"num", v.get_num().get_si()},
                       {"den", v.get_den().get_si()}});
      }
      if (out.empty()) continue;
      const auto& la = basis.label(a);
      const auto& lb = basis.label(b);
      brackets.push_back({{"left", {la.level, la.index}},
                          {"right", {lb.level, lb.index}},
                          {"out", out}});
    }
  return {{"name", g.name()}, {"step", g.step()}, {"dims", basis.dims()}, {"brackets", brackets}};
}

}  // namespace nilwalk
