#include <gtest/gtest.h>

#include "nilwalk/catalog.hpp"
#include "nilwalk/group_law.hpp"
#include "nilwalk/matrix_oracle.hpp"
#include "support.hpp"

namespace nilwalk {
namespace {

using testing::random_vector;

const GroupLaw& law_of(const std::string& name) {
  static std::map<std::string, GroupLaw> laws;
  auto it = laws.find(name);
  if (it == laws.end()) it = laws.emplace(name, GroupLaw(catalog_entry(name).algebra)).first;
  return it->second;
}

Polynomial var(int slot, int coord) { return Polynomial::variable({slot, coord}); }

TEST(Dynkin, LowOrderCoefficients) {
  // Right-nested words: XY -> 1/4, YX -> -1/4 so the degree-2 part is [X,Y]/2.
  std::map<std::vector<int>, Rational> c;
  for (const auto& t : dynkin_series(3)) c[t.word] = t.coefficient;
  EXPECT_EQ(c[{0}], 1);
  EXPECT_EQ(c[{1}], 1);
  EXPECT_EQ(c[(std::vector<int>{0, 1})], Rational(1, 4));
  EXPECT_EQ(c[(std::vector<int>{1, 0})], Rational(-1, 4));
}

TEST(GroupLaw, HeisenbergTable) {
  const auto& law = law_of("heisenberg3");
  Polynomial expected = var(1, 2) + var(2, 2) +
                        (var(1, 0) * var(2, 1) - var(1, 1) * var(2, 0)) * Rational(1, 2);
  EXPECT_EQ(law.polynomial(2), expected);
  EXPECT_EQ(law.polynomial(0), var(1, 0) + var(2, 0));
}

TEST(GroupLaw, AbelianIsAddition) {
  GroupLaw law(abelian_algebra({2, 2, 1}));
  for (int c = 0; c < law.dim(); ++c) EXPECT_EQ(law.polynomial(c), var(1, c) + var(2, c));
}

TEST(GroupLaw, TableInvariants) {
  for (const auto& name : catalog_names()) {
    const auto& law = law_of(name);
    const auto& b = law.basis();
    for (int c = 0; c < law.dim(); ++c) {
      const int level = b.level_of(c);
      Polynomial rest = law.polynomial(c) - var(1, c) - var(2, c);
      for (const auto& [m, coef] : rest.terms()) {
        EXPECT_LE(m.homogeneous_degree(b), level) << name;
        EXPECT_GE(m.degree(), 2) << name;
      }
      if (level == 1) EXPECT_TRUE(rest.is_zero());
    }
  }
}

TEST(Multiply, Examples) {
  const auto& law = law_of("heisenberg3");
  auto xy = law.multiply(ExactVector{1, 0, 0}, ExactVector{0, 1, 0});
  EXPECT_EQ(xy, (ExactVector{1, 1, Rational(1, 2)}));
  EXPECT_EQ(law.multiply(xy, ExactVector{-1, 0, 0}), (ExactVector{0, 1, 1}));
  auto f = law.multiply(to_float(ExactVector{1, 0, 0}), to_float(ExactVector{0, 1, 0}));
  EXPECT_DOUBLE_EQ(f[2], 0.5);
}

// Independent UT(3) oracle: (a,b,c) -> rows (1,a,c+ab/2),(0,1,b),(0,0,1).
TEST(Multiply, HeisenbergClosedFormMatrices) {
  auto to_m = [](const ExactVector& v) {
    ExactMatrix m = ExactMatrix::identity(3);
    m(0, 1) = v[0];
    m(1, 2) = v[1];
    m(0, 2) = v[2] + v[0] * v[1] / 2;
    return m;
  };
  auto from_m = [](const ExactMatrix& m) {
    return ExactVector{m(0, 1), m(1, 2), Rational(m(0, 2) - m(0, 1) * m(1, 2) / 2)};
  };
  std::mt19937_64 rng(5);
  const auto& law = law_of("heisenberg3");
  for (int t = 0; t < 200; ++t) {
    auto x = random_vector(rng, 3), y = random_vector(rng, 3);
    EXPECT_EQ(law.multiply(x, y), from_m(to_m(x) * to_m(y)));
  }
}

TEST(Multiply, GroupAxioms) {
  std::mt19937_64 rng(1);
  for (const auto& name : catalog_names()) {
    const auto& law = law_of(name);
    for (int t = 0; t < 10000 / 10; ++t) {
      auto x = random_vector(rng, law.dim()), y = random_vector(rng, law.dim()),
           z = random_vector(rng, law.dim());
      EXPECT_EQ(law.multiply(law.multiply(x, y), z), law.multiply(x, law.multiply(y, z))) << name;
      EXPECT_TRUE(law.multiply(x, -x).is_zero_vector());
      EXPECT_EQ(law.multiply(x, ExactVector::zero(law.dim())), x);
    }
  }
}

TEST(Multiply, OracleEquivalence) {
  std::mt19937_64 rng(2);
  for (const auto& name : catalog_names()) {
    const auto& entry = catalog_entry(name);
    const auto& law = law_of(name);
    for (int t = 0; t < 200; ++t) {
      auto x = random_vector(rng, law.dim()), y = random_vector(rng, law.dim());
      EXPECT_EQ(law.multiply(x, y), matrix_oracle_product(entry, {x, y})) << name;
    }
  }
}

TEST(Oracle, Examples) {
  const auto& e = catalog_entry("heisenberg3");
  EXPECT_TRUE(matrix_oracle_product(e, {ExactVector::zero(3), ExactVector::zero(3)}).is_zero_vector());
  EXPECT_EQ(matrix_oracle_product(e, {ExactVector{1, 0, 0}, ExactVector{0, 1, 0}}),
            (ExactVector{1, 1, Rational(1, 2)}));
  GroupCatalogEntry bare{"abelian", abelian_algebra({2}), std::nullopt};
  EXPECT_THROW(matrix_oracle_product(bare, {ExactVector{1, 0}}), MathError);
}

TEST(Product, FoldExamples) {
  const auto& law = law_of("heisenberg3");
  std::vector<ExactVector> single{ExactVector{2, 3, 5}};
  EXPECT_EQ(product(law, single), single.front());
  EXPECT_EQ(product(law, std::vector<ExactVector>{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}}),
            (ExactVector{6, 0, 0}));
  EXPECT_EQ(product(law, std::vector<ExactVector>{{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}}),
            (ExactVector{0, 1, 1}));
  EXPECT_THROW(product(law, std::vector<ExactVector>{}), std::invalid_argument);
}

TEST(Product, LevelOneIsPlainSum) {
  std::mt19937_64 rng(9);
  for (const auto& name : catalog_names()) {
    const auto& law = law_of(name);
    auto [lo, hi] = law.basis().level_range(1);
    for (int t = 0; t < 50; ++t) {
      std::vector<ExactVector> xs;
      for (int k = 0; k < 6; ++k) xs.push_back(random_vector(rng, law.dim()));
      auto p = product(law, xs);
      for (int c = lo; c < hi; ++c) {
        Rational s = 0;
        for (const auto& x : xs) s += x[c];
        EXPECT_EQ(p[c], s);
      }
      EXPECT_EQ(p, matrix_oracle_product(catalog_entry(name), xs));
    }
  }
}

TEST(Translate, IdentityTranslation) {
  const auto& law = law_of("ut4");
  auto t = translate_polynomials(law, ExactVector::zero(6), ExactVector::zero(6));
  EXPECT_EQ(t.p, identity_map(6));
  EXPECT_EQ(t.q, identity_map(6));
  EXPECT_EQ(t.height, 1);
}

TEST(Translate, HeisenbergLeftShift) {
  const auto& law = law_of("heisenberg3");
  auto t = translate_polynomials(law, ExactVector{1, 0, 0}, ExactVector::zero(3));
  EXPECT_EQ(t.p[0], var(1, 0) + Polynomial(1));
  EXPECT_EQ(t.p[1], var(1, 1));
  EXPECT_EQ(t.p[2], var(1, 2) + var(1, 1) * Rational(1, 2));
  // Check against the matrix oracle at random points.
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    auto x = random_vector(rng, 3);
    auto expect = matrix_oracle_product(catalog_entry("heisenberg3"), {ExactVector{1, 0, 0}, x});
    for (int c = 0; c < 3; ++c)
      EXPECT_EQ(t.p[c].evaluate<Rational>([&](SeqVariable v) { return x[v.coord]; }), expect[c]);
  }
}

TEST(Translate, CentralHeight) {
  const auto& law = law_of("heisenberg3");
  for (Rational T : {Rational(1, 2), Rational(7), Rational(-40)}) {
    auto t = translate_polynomials(law, ExactVector{0, 0, T}, ExactVector::zero(3));
    EXPECT_EQ(t.height, std::max<Rational>(1, abs(T)));
  }
}

TEST(Translate, InverseRoundTrip) {
  std::mt19937_64 rng(6);
  for (const auto& name : catalog_names()) {
    const auto& law = law_of(name);
    for (int k = 0; k < 5; ++k) {
      auto t = translate_polynomials(law, random_vector(rng, law.dim()), random_vector(rng, law.dim()));
      EXPECT_EQ(compose_maps(t.q, t.p), identity_map(law.dim())) << name;
      EXPECT_EQ(compose_maps(t.p, t.q), identity_map(law.dim())) << name;
    }
  }
}

}  // namespace
}  // namespace nilwalk
