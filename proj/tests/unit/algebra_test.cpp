#include <gtest/gtest.h>

#include "nilwalk/algebra.hpp"
#include "nilwalk/catalog.hpp"
#include "support.hpp"

namespace nilwalk {
namespace {

using testing::random_vector;

TEST(GradedBasis, CatalogDimensions) {
  struct Case {
    const char* name;
    int step, q, D;
  };
  for (auto c : {Case{"heisenberg3", 2, 3, 4}, Case{"ut4", 3, 6, 10}, Case{"free2step3", 3, 5, 10}}) {
    const auto& b = catalog_entry(c.name).algebra.basis();
    EXPECT_EQ(b.step(), c.step) << c.name;
    EXPECT_EQ(b.total_dim(), c.q) << c.name;
    EXPECT_EQ(b.homogeneous_dim(), c.D) << c.name;
    EXPECT_TRUE(std::is_sorted(b.labels().begin(), b.labels().end()));
  }
}

TEST(GradedBasis, RejectsEmptyLayers) {
  EXPECT_THROW(GradedBasis({2, 0}), StructuralError);
  EXPECT_THROW(GradedBasis(std::vector<int>{}), StructuralError);
}

TEST(Validate, CatalogIsValid) {
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    EXPECT_TRUE(validate_algebra(g.basis(), g.constants()).ok()) << name;
  }
}

TEST(Validate, BrokenAntisymmetryIsReported) {
  GradedBasis b({2, 1});
  StructureConstants k(3);
  k.set(0, 1, 2, 1);
  k.set(1, 0, 2, 1);
  auto report = validate_algebra(b, k);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().axiom, "antisymmetry");
  EXPECT_EQ(report.violations.front().witness, (std::vector<Label>{{1, 1}, {1, 2}}));
  EXPECT_THROW(LieAlgebra("broken", b, k), MathError);
}

TEST(Validate, GradingAndJacobiViolations) {
  GradedBasis b({2, 1});
  StructureConstants k(3);
  k.set_antisymmetric(0, 1, {{0, Rational(1)}});
  auto report = validate_algebra(b, k);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().axiom, "grading");

  // [e1,e2]=e4 and [e4,e3]=e5 alone: the cyclic sum on (e1,e2,e3) is e5.
  GradedBasis flat({3, 1, 1});
  StructureConstants j(5);
  j.set_antisymmetric(0, 1, {{3, Rational(1)}});
  j.set_antisymmetric(3, 2, {{4, Rational(1)}});
  bool jacobi = false;
  for (const auto& v : validate_algebra(flat, j).violations) jacobi |= v.axiom == "jacobi";
  EXPECT_TRUE(jacobi);
}

TEST(Validate, DimensionMismatchIsStructural) {
  EXPECT_THROW(validate_algebra(GradedBasis({2, 1}), StructureConstants(4)), StructuralError);
}

TEST(Catalog, Ut4ConstantsFromElementaryMatrices) {
  const auto& e = catalog_entry("ut4");
  auto derived = constants_from_representation(e.algebra.basis(), *e.representation);
  EXPECT_TRUE(derived == e.algebra.constants());
  EXPECT_TRUE(validate_algebra(e.algebra.basis(), derived).ok());
}

TEST(Catalog, RepresentationsReproduceConstants) {
  for (const auto& name : catalog_names()) {
    const auto& e = catalog_entry(name);
    ASSERT_TRUE(e.representation.has_value()) << name;
    EXPECT_TRUE(constants_from_representation(e.algebra.basis(), *e.representation) ==
                e.algebra.constants())
        << name;
  }
}

TEST(Catalog, UnknownNameThrows) { EXPECT_THROW(catalog_entry("sl2"), StructuralError); }

TEST(Catalog, JsonDocumentRoundTrip) {
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    auto doc = parse_algebra_document(algebra_to_json(g));
    EXPECT_TRUE(doc.basis == g.basis());
    EXPECT_TRUE(doc.constants == g.constants()) << name;
  }
}

TEST(Catalog, JsonExplicitReverseIsKept) {
  auto j = nlohmann::json::parse(R"({"step":2,"dims":[2,1],"brackets":[
    {"left":[1,1],"right":[1,2],"out":[{"label":[2,1],"num":1,"den":1}]},
    {"left":[1,2],"right":[1,1],"out":[{"label":[2,1],"num":1,"den":1}]}]})");
  auto doc = parse_algebra_document(j);
  EXPECT_FALSE(validate_algebra(doc.basis, doc.constants).ok());
  auto bad = nlohmann::json::parse(R"({"step":2,"dims":[2,1],"brackets":[
    {"left":[1,1],"right":[1,3],"out":[]}]})");
  EXPECT_THROW(parse_algebra_document(bad), StructuralError);
}

TEST(Bracket, HeisenbergRelation) {
  const auto& g = catalog_entry("heisenberg3").algebra;
  ExactVector x{1, 0, 0}, y{0, 1, 0};
  EXPECT_EQ(bracket(g, x, y), (ExactVector{0, 0, 1}));
}

TEST(Bracket, Ut4ElementaryCommutator) {
  const auto& g = catalog_entry("ut4").algebra;
  ExactVector e12{1, 0, 0, 0, 0, 0}, e23{0, 1, 0, 0, 0, 0}, e13{0, 0, 0, 1, 0, 0};
  EXPECT_EQ(bracket(g, e12, e23), e13);
}

TEST(Bracket, AntisymmetricAndBilinear) {
  std::mt19937_64 rng(7);
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    for (int t = 0; t < 200; ++t) {
      auto x = random_vector(rng, g.dim()), y = random_vector(rng, g.dim()),
           z = random_vector(rng, g.dim());
      Rational a = testing::random_rational(rng);
      EXPECT_TRUE(bracket(g, x, x).is_zero_vector());
      EXPECT_EQ(bracket(g, x, y), -bracket(g, y, x));
      EXPECT_EQ(bracket(g, a * x + z, y), a * bracket(g, x, y) + bracket(g, z, y));
    }
  }
}

TEST(Bracket, OutputGradingOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    const auto& b = g.basis();
    for (int t = 0; t < 10000 / 3; ++t) {
      // Pure level-i and level-k inputs bracket into levels >= i+k.
      const int i = 1 + static_cast<int>(rng() % b.step());
      const int k = 1 + static_cast<int>(rng() % b.step());
      auto x = random_vector(rng, g.dim()), y = random_vector(rng, g.dim());
      for (int c = 0; c < g.dim(); ++c) {
        if (b.level_of(c) != i) x[c] = 0;
        if (b.level_of(c) != k) y[c] = 0;
      }
      auto z = bracket(g, x, y);
      for (int c = 0; c < g.dim(); ++c)
        if (b.level_of(c) < i + k) EXPECT_EQ(z[c], 0);
    }
  }
}

TEST(Dilate, Examples) {
  const auto& h = catalog_entry("heisenberg3").algebra.basis();
  EXPECT_EQ(dilate(h, Rational(2), ExactVector{1, 1, 1}), (ExactVector{2, 2, 4}));
  ExactVector x{3, -1, 7};
  EXPECT_EQ(dilate(h, Rational(1), x), x);
  const auto& f = catalog_entry("free2step3").algebra.basis();
  EXPECT_EQ(dilate(f, Rational(3), ExactVector{1, 0, 1, 1, 0}), (ExactVector{3, 0, 9, 27, 0}));
  EXPECT_THROW(dilate(h, Rational(0), x), std::invalid_argument);
  EXPECT_THROW(dilate(h, Rational(-1), x), std::invalid_argument);
}

TEST(Dilate, IsGradedAutomorphism) {
  std::mt19937_64 rng(3);
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    for (Rational r : {Rational(2), Rational(1, 3), Rational(5)})
      for (int t = 0; t < 50; ++t) {
        auto x = random_vector(rng, g.dim()), y = random_vector(rng, g.dim());
        EXPECT_EQ(bracket(g, dilate(g.basis(), r, x), dilate(g.basis(), r, y)),
                  dilate(g.basis(), r, bracket(g, x, y)));
        EXPECT_EQ(dilate(g.basis(), r, dilate(g.basis(), Rational(7, 2), x)),
                  dilate(g.basis(), Rational(r * Rational(7, 2)), x));
      }
  }
}

TEST(Rational, Parsing) {
  EXPECT_EQ(parse_rational("3"), 3);
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
  EXPECT_EQ(parse_rational("1.5e2"), 150);
  EXPECT_EQ(parse_rational("2e-3"), Rational(1, 500));
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_EQ(rational_gcd(Rational(2, 3), Rational(1, 2)), Rational(1, 6));
}

}  // namespace
}  // namespace nilwalk
