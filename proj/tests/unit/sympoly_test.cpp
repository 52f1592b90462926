#include <gtest/gtest.h>

#include "nilwalk/catalog.hpp"
#include "nilwalk/product_expansion.hpp"
#include "nilwalk/ustatistic.hpp"
#include "support.hpp"

namespace nilwalk {
namespace {

using testing::random_vector;

Polynomial x(int seq, int coord) { return Polynomial::variable({seq, coord}); }

TEST(Monomial, DegreesAndTypeClass) {
  const auto& b = catalog_entry("free2step3").algebra.basis();
  auto m = Monomial::from_factors({{{5, 0}, 2}, {{2, 3}, 1}, {{5, 1}, 1}});
  EXPECT_EQ(m.degree(), 4);
  EXPECT_EQ(m.homogeneous_degree(b), 2 + 3 + 1);
  EXPECT_EQ(m.index_set(), (std::vector<int>{2, 5}));
  EXPECT_EQ(m.type_class(), Monomial::from_factors({{{2, 0}, 2}, {{1, 3}, 1}, {{2, 1}, 1}}));
  // Homogeneous degree equals degree exactly when all variables are level 1.
  auto flat = Monomial::from_factors({{{1, 0}, 3}, {{4, 1}, 2}});
  EXPECT_EQ(flat.homogeneous_degree(b), flat.degree());
  EXPECT_GT(m.homogeneous_degree(b), m.degree());
}

TEST(Polynomial, CanonicalForm) {
  Polynomial p = x(1, 0) * x(2, 1) - x(2, 1) * x(1, 0);
  EXPECT_TRUE(p.is_zero());
  Polynomial q = (x(1, 0) + Polynomial(2)) * (x(1, 0) - Polynomial(2));
  EXPECT_EQ(q, x(1, 0) * x(1, 0) - Polynomial(4));
  EXPECT_EQ(q.l1_norm(), 5);
  EXPECT_EQ(q.height(), 4);
}

TEST(Polynomial, JsonRoundTrip) {
  const auto& b = catalog_entry("heisenberg3").algebra.basis();
  Polynomial p = x(3, 2) * Rational(-7, 3) + x(1, 0) * x(2, 1) * x(2, 1) + Polynomial(5);
  EXPECT_EQ(polynomial_from_json(polynomial_to_json(p, b), b), p);
}

TEST(Expand, HeisenbergTwoAndFour) {
  GroupLaw law(catalog_entry("heisenberg3").algebra);
  auto p2 = expand_product(law, 2);
  EXPECT_EQ(p2.nonlinear[2], (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) * Rational(1, 2));
  auto p4 = expand_product(law, 4);
  Polynomial expected;
  for (int k = 1; k <= 4; ++k)
    for (int l = k + 1; l <= 4; ++l) expected += (x(k, 0) * x(l, 1) - x(k, 1) * x(l, 0)) * Rational(1, 2);
  EXPECT_EQ(p4.nonlinear[2], expected);
  EXPECT_TRUE(p4.nonlinear[0].is_zero());
}

TEST(Expand, AbelianHasNoRemainder) {
  GroupLaw law(abelian_algebra({2, 1, 1}));
  auto p = expand_product(law, 5);
  for (const auto& r : p.nonlinear) EXPECT_TRUE(r.is_zero());
}

TEST(Expand, MatchesNumericProduct) {
  std::mt19937_64 rng(12);
  for (const auto& name : catalog_names()) {
    GroupLaw law(catalog_entry(name).algebra);
    ProductExpander e(law);
    for (int n = 2; n <= (name == "ut4" ? 4 : 6); ++n) {
      e.extend_to(n);
      auto p = e.snapshot();
      for (int t = 0; t < 20; ++t) {
        std::vector<ExactVector> xs;
        for (int k = 0; k < n; ++k) xs.push_back(random_vector(rng, law.dim()));
        auto direct = product(law, xs);
        for (int c = 0; c < law.dim(); ++c)
          EXPECT_EQ(p.full[c].evaluate<Rational>([&](SeqVariable v) { return xs[v.seq - 1][v.coord]; }),
                    direct[c])
              << name << " N=" << n;
      }
    }
  }
}

TEST(Expand, BudgetIsEnforced) {
  GroupLaw law(catalog_entry("free2step3").algebra);
  EXPECT_THROW(expand_product(law, 6, 50), ResourceError);
  EXPECT_THROW(expand_product(law, 0), std::invalid_argument);
}

TEST(ProductLemma, HoldsOnCatalog) {
  struct Case {
    const char* name;
    int n, m;
  };
  for (auto c : {Case{"heisenberg3", 3, 5}, Case{"free2step3", 4, 6}}) {
    GroupLaw law(catalog_entry(c.name).algebra);
    auto report = check_product_lemma(law.basis(), expand_product(law, c.n), expand_product(law, c.m));
    EXPECT_EQ(report.status, LemmaStatus::kPass) << c.name << ": " << report.witness.value_or("");
  }
}

TEST(ProductLemma, MutatedCoefficientIsNamed) {
  GroupLaw law(catalog_entry("heisenberg3").algebra);
  auto small = expand_product(law, 3);
  auto big = expand_product(law, 5);
  big.nonlinear[2].add_term(Monomial::from_factors({{{2, 0}, 1}, {{4, 1}, 1}}), Rational(1, 3));
  auto report = check_product_lemma(law.basis(), small, big);
  ASSERT_EQ(report.status, LemmaStatus::kFail);
  EXPECT_NE(report.witness->find("x1[1,1]*x2[1,2]"), std::string::npos) << *report.witness;
}

TEST(UDecompose, HeisenbergFour) {
  GroupLaw law(catalog_entry("heisenberg3").algebra);
  const auto& b = law.basis();
  auto p4 = expand_product(law, 4);
  auto d = u_decompose(p4.nonlinear[2], 4, b);
  ASSERT_EQ(d.terms.size(), 2u);
  std::map<std::vector<std::vector<std::pair<int, int>>>, Rational> got;
  for (const auto& [spec, c] : d.terms) got[spec.blocks] = c;
  EXPECT_EQ((got[{{{0, 1}}, {{1, 1}}}]), Rational(1, 2));
  EXPECT_EQ((got[{{{1, 1}}, {{0, 1}}}]), Rational(-1, 2));
  EXPECT_EQ(d.l1_norm, 1);
  EXPECT_EQ(u_recombine(d, 4), p4.nonlinear[2]);
}

TEST(UDecompose, TrivialCases) {
  const auto& b = catalog_entry("heisenberg3").algebra.basis();
  EXPECT_TRUE(u_decompose(Polynomial(), 3, b).terms.empty());
  auto d = u_decompose(x(1, 0) + x(2, 0) + x(3, 0), 3, b);
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_EQ(d.terms[0].first.order(), 1);
  EXPECT_EQ(d.terms[0].second, 1);
  EXPECT_THROW(u_decompose(x(1, 0) + x(2, 0), 3, b), MathError);
}

TEST(UDecompose, ReexpansionIsIdentity) {
  for (const char* name : {"heisenberg3", "free2step3", "ut4"}) {
    GroupLaw law(catalog_entry(name).algebra);
    for (int n = 2; n <= 5; ++n) {
      auto p = expand_product(law, n);
      for (const auto& poly : p.nonlinear)
        EXPECT_EQ(u_recombine(u_decompose(poly, n, law.basis()), n), poly) << name;
    }
  }
}

TEST(UEvaluate, Examples) {
  UStatisticSpec one{{{{0, 1}}}};
  std::vector<ExactVector> xs{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  EXPECT_EQ(u_evaluate(one, xs), 6);
  UStatisticSpec two{{{{0, 1}}, {{1, 1}}}};
  EXPECT_EQ(u_evaluate(two, std::vector<ExactVector>{{1, 0, 0}}), 0);
  std::vector<ExactVector> ys{{1, 0, 0}, {0, 2, 0}, {3, 4, 0}};
  EXPECT_EQ(u_evaluate(two, ys), 6);
  std::vector<FloatVector> fs{{1, 0, 0}, {0, 2, 0}, {3, 4, 0}};
  EXPECT_DOUBLE_EQ(u_evaluate(two, fs), 6.0);
}

TEST(UEvaluate, AgreesWithExpansion) {
  std::mt19937_64 rng(8);
  const auto& b = catalog_entry("free2step3").algebra.basis();
  UStatisticSpec spec{{{{0, 2}}, {{1, 1}, {2, 1}}, {{0, 1}}}};
  validate_ustatistic(spec, b);
  EXPECT_EQ(spec.homogeneous_degree(b), 2 + 3 + 1);
  for (int n = 0; n <= 6; ++n) {
    std::vector<ExactVector> xs;
    for (int k = 0; k < n; ++k) xs.push_back(random_vector(rng, 5));
    auto poly = u_expand(spec, n);
    EXPECT_EQ(u_evaluate(spec, xs),
              poly.evaluate<Rational>([&](SeqVariable v) { return xs[v.seq - 1][v.coord]; }));
  }
  EXPECT_EQ(ustatistic_from_json(ustatistic_to_json(spec, b), b), spec);
}

}  // namespace
}  // namespace nilwalk
