#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nilwalk/catalog.hpp"
#include "nilwalk/errors.hpp"
#include "nilwalk/measure.hpp"
#include "support.hpp"

namespace nilwalk {
namespace {

const LieAlgebra& heis() { return catalog_entry("heisenberg3").algebra; }

Monomial x(int c, int e = 1) { return Monomial::variable({1, c}, e); }

ExactVector vec(std::vector<Rational> v) { return ExactVector(std::move(v)); }

Measure rademacher() {
  return Measure::discrete({vec({1, 0, 0}), vec({-1, 0, 0})}, {Rational(1, 2), Rational(1, 2)});
}

Measure unit_box() {
  return Measure::box({{Rational(-1, 2), Rational(1, 2)}, {Rational(-1, 2), Rational(1, 2)}, {0, 0}});
}

// Level-1 coordinates centered by shifting all atoms.
Measure random_centered(std::mt19937_64& rng, int q, int d1, int atoms) {
  std::vector<ExactVector> a;
  for (int i = 0; i < atoms; ++i) a.push_back(testing::random_vector(rng, q));
  for (int c = 0; c < d1; ++c) {
    Rational mean = 0;
    for (const auto& v : a) mean += v[c];
    mean /= atoms;
    for (auto& v : a) v[c] -= mean;
  }
  return Measure::discrete(a, std::vector<Rational>(atoms, Rational(1, atoms)));
}

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsDependOnlyOnIds) {
  RandomStream a(7, 1, 2, 3), b(7, 1, 2, 3), c(7, 1, 2, 4);
  for (int i = 0; i < 10; ++i) {
    const auto va = a.next_u32();
    EXPECT_EQ(va, b.next_u32());
    EXPECT_NE(va, c.next_u32());
  }
}

TEST(Moments, Examples) {
  Measure u = Measure::box({{Rational(-1, 2), Rational(1, 2)}});
  EXPECT_EQ(u.moment(x(0)), 0);
  EXPECT_EQ(u.moment(x(0, 2)), Rational(1, 12));
  EXPECT_EQ(u.moment(x(0, 4)), Rational(1, 80));
  EXPECT_EQ(u.moment(Monomial()), 1);

  EXPECT_EQ(rademacher().moment(x(0)), 0);
  EXPECT_EQ(rademacher().moment(x(0, 2)), 1);

  Measure mix = Measure::discrete({vec({2, 0, 0}), vec({-6, 0, 0})}, {Rational(3, 4), Rational(1, 4)});
  EXPECT_EQ(mix.moment(x(0)), 0);
  EXPECT_EQ(mix.moment(x(0, 2)), 12);
  Measure nested = Measure::mixture({Measure::point_mass(vec({2, 0, 0})), Measure::point_mass(vec({-6, 0, 0}))},
                                    {Rational(3, 4), Rational(1, 4)});
  EXPECT_EQ(nested.moment(x(0, 2)), 12);
}

TEST(Moments, TableHasUnitConstantAndHomogeneousDegrees) {
  const auto& basis = heis().basis();
  auto t = moments(unit_box(), basis, 3);
  EXPECT_EQ(t.at(Monomial()), 1);
  for (const auto& [m, v] : t) EXPECT_LE(m.homogeneous_degree(basis), 3);
  // x1^a x2^b with a + b <= 3 (10), times x3 with a + b <= 1 (3)
  EXPECT_EQ(t.size(), 13u);
  EXPECT_EQ(t.at(x(0) * x(0)), Rational(1, 12));
  EXPECT_EQ(t.at(x(0) * x(1)), 0);
  EXPECT_THROW(moments(unit_box(), basis, -1), std::invalid_argument);
}

TEST(Moments, InvalidWeightsRejected) {
  EXPECT_THROW(Measure::discrete({vec({1, 0, 0})}, {Rational(1, 2)}), std::invalid_argument);
  EXPECT_THROW(Measure::discrete({vec({1, 0, 0}), vec({0, 0, 0})}, {Rational(3, 2), Rational(-1, 2)}),
               std::invalid_argument);
}

TEST(Moments, GaussianAndTwoPointLatents) {
  EXPECT_EQ(Latent::gaussian(2).moment(4), 12);
  EXPECT_EQ(Latent::gaussian(2).moment(3), 0);
  auto tp = Latent::two_point(-1, 2, Rational(1, 3));
  EXPECT_EQ(tp.moment(1), 0);
  EXPECT_EQ(tp.moment(2), 2);
  EXPECT_EQ(tp.moment(3), 2);
}

TEST(CharFn, Examples) {
  const auto& basis = heis().basis();
  for (const Measure& mu : {rademacher(), unit_box()}) {
    std::vector<double> zero{0.0, 0.0};
    EXPECT_NEAR(std::abs(mu.abelian_char_fn(basis, zero) - 1.0), 0.0, 1e-15);
  }
  std::vector<double> one{1.0, 0.0};
  EXPECT_NEAR(std::abs(unit_box().abelian_char_fn(basis, one)), 0.0, 1e-15);
  std::vector<double> half{0.5, 0.0};
  auto v = rademacher().abelian_char_fn(basis, half);
  EXPECT_NEAR(v.real(), -1.0, 1e-15);
  EXPECT_NEAR(std::abs(v), 1.0, 1e-15);
}

TEST(CharFn, BoundedAndMatchesDirectSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> freq(-3.0, 3.0);
  const auto& basis = heis().basis();
  Measure mu = random_centered(rng, 3, 2, 5);
  Measure affine = Measure::affine({Latent::uniform(-1, 2), Latent::two_point(-1, 1, Rational(1, 4))}, vec({0, 1, 0}),
                                   {{1, 2}, {Rational(1, 2), -1}, {0, 0}});
  for (int t = 0; t < 200; ++t) {
    std::vector<double> xi{freq(rng), freq(rng)};
    EXPECT_LE(std::abs(mu.abelian_char_fn(basis, xi)), 1.0 + 1e-12);
    std::complex<double> direct = 0.0;
    for (std::size_t a = 0; a < mu.atoms().size(); ++a) {
      const double ph = xi[0] * to_double(mu.atoms()[a][0]) + xi[1] * to_double(mu.atoms()[a][1]);
      direct += std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * ph)) / double(mu.atoms().size());
    }
    EXPECT_NEAR(std::abs(mu.abelian_char_fn(basis, xi) - direct), 0.0, 1e-12);
    // latent form against numerical quadrature in the uniform variable
    std::complex<double> quad = 0.0;
    const int steps = 4000;
    for (int s = 0; s < steps; ++s) {
      const double u = -1.0 + 3.0 * (s + 0.5) / steps;
      for (auto [z, p] : {std::pair{-1.0, 0.75}, std::pair{1.0, 0.25}}) {
        const double x1 = u + 2 * z, x2 = 1.0 + 0.5 * u - z;
        quad += p / steps * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * (xi[0] * x1 + xi[1] * x2)));
      }
    }
    EXPECT_NEAR(std::abs(affine.abelian_char_fn(basis, xi) - quad), 0.0, 1e-5);
  }
}

TEST(Cramer, BoxSatisfiesWithMargin) {
  auto rep = cramer_check(unit_box(), heis().basis(), 1.0, 6.0);
  EXPECT_EQ(rep.verdict, CramerReport::Verdict::kSatisfies);
  EXPECT_GE(rep.margin, 0.6);
  EXPECT_FALSE(rep.witness);
  for (const auto& s : rep.shells) {
    EXPECT_GE(s.sup, 0.0);
    EXPECT_LE(s.sup, 1.0);
  }
}

TEST(Cramer, RademacherFailsWithExactWitness) {
  auto rep = cramer_check(rademacher(), heis().basis(), 0.25, 4.0);
  EXPECT_EQ(rep.verdict, CramerReport::Verdict::kFails);
  ASSERT_TRUE(rep.witness);
  EXPECT_NEAR((*rep.witness)[0], 0.5, 1e-15);
  EXPECT_EQ((*rep.witness)[1], 0.0);
  EXPECT_EQ(to_string(rep.verdict), "fails");
}

TEST(Cramer, LatticeWitnessForRationalAtoms) {
  Measure mu = Measure::discrete({vec({Rational(2, 3), Rational(1, 5), 0}), vec({Rational(-2, 3), Rational(-1, 5), 0}),
                                  vec({0, 0, 0})},
                                 {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  auto rep = cramer_check(mu, heis().basis(), 1.0, 5.0, 16);
  ASSERT_TRUE(rep.witness);
  EXPECT_NEAR(std::abs(mu.abelian_char_fn(heis().basis(), *rep.witness)), 1.0, 1e-12);
}

TEST(Cramer, GaussianMargin) {
  auto mu = Measure::affine({Latent::gaussian(1), Latent::gaussian(1)}, vec({0, 0, 0}), {{1, 0}, {0, 1}, {0, 0}});
  auto rep = cramer_check(mu, heis().basis(), 1.0, 4.0);
  EXPECT_EQ(rep.verdict, CramerReport::Verdict::kSatisfies);
  EXPECT_NEAR(rep.margin, 1.0 - std::exp(-2.0 * std::numbers::pi * std::numbers::pi), 1e-9);
}

TEST(Cramer, ShellSupsAreMonotoneInTheInnerRadius) {
  std::mt19937_64 rng(5);
  Measure mu = Measure::mixture({unit_box(), Measure::box({{-1, 1}, {0, Rational(1, 3)}, {0, 0}})},
                                {Rational(1, 2), Rational(1, 2)});
  auto rep = cramer_check(mu, heis().basis(), 0.5, 4.0, 32);
  double tail = 0.0;
  for (auto it = rep.shells.rbegin(); it != rep.shells.rend(); ++it) {
    const double next = std::max(tail, it->sup);
    EXPECT_GE(next + 1e-12, tail);
    tail = next;
  }
  EXPECT_NEAR(tail, rep.sup, 1e-12);
  EXPECT_THROW(cramer_check(mu, heis().basis(), 0.0, 1.0), std::invalid_argument);
}

TEST(SubLaplacian, Examples) {
  auto s = sublaplacian_coeffs(unit_box(), heis());
  EXPECT_EQ(s.a[0][0], Rational(1, 24));
  EXPECT_EQ(s.a[1][1], Rational(1, 24));
  EXPECT_EQ(s.a[0][1], 0);
  EXPECT_EQ(s.b, std::vector<Rational>{0});
  EXPECT_EQ(s.drift, std::vector<Rational>{0});

  auto z = sublaplacian_coeffs(Measure::point_mass(vec({0, 0, 0})), heis());
  for (const auto& row : z.a)
    for (const auto& v : row) EXPECT_EQ(v, 0);
  EXPECT_EQ(z.drift, std::vector<Rational>{0});
}

TEST(SubLaplacian, DiagonalUniformDrift) {
  // (u, u, 0) with u uniform on [-1/2, 1/2]
  Measure diag = Measure::affine({Latent::uniform(Rational(-1, 2), Rational(1, 2))}, vec({0, 0, 0}), {{1}, {1}, {0}});
  auto s = sublaplacian_coeffs(diag, heis());
  // independent oracle: the antiderivative u^3/3 on [-1/2, 1/2]
  const Rational second = (Rational(1, 8) / 3) - (Rational(-1, 8) / 3);
  EXPECT_EQ(second, Rational(1, 12));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(s.a[i][j], second / 2);
  EXPECT_EQ(s.b[0], 0);
  EXPECT_EQ(s.drift[0], -second / 4);
  EXPECT_EQ(s.drift[0], Rational(-1, 48));
}

TEST(SubLaplacian, RejectsUncenteredMeasures) {
  EXPECT_THROW(sublaplacian_coeffs(Measure::point_mass(vec({1, 0, 0})), heis()), MathError);
}

void expect_matched(const Measure& mu, const LieAlgebra& g, MatchStrategy strategy = MatchStrategy::kAuto) {
  Measure phi = matched_measure(mu, g, strategy);
  EXPECT_TRUE(phi.is_compact_continuous());
  EXPECT_LE(moment_mismatch(mu, phi, g.basis(), 3), 1e-10);
  auto a = sublaplacian_coeffs(mu, g), b = sublaplacian_coeffs(phi, g);
  for (std::size_t i = 0; i < a.a.size(); ++i)
    for (std::size_t j = 0; j < a.a.size(); ++j) EXPECT_NEAR(to_double(Rational(a.a[i][j] - b.a[i][j])), 0.0, 1e-10);
  for (std::size_t i = 0; i < a.drift.size(); ++i)
    EXPECT_NEAR(to_double(Rational(a.drift[i] - b.drift[i])), 0.0, 1e-10);
}

TEST(Matched, BoxIsAFixedPoint) {
  Measure box = Measure::box({{Rational(-1, 2), Rational(1, 2)}, {-1, 1}, {Rational(1, 3), 1}});
  Measure phi = matched_measure(box, heis());
  EXPECT_EQ(phi.to_json(), box.to_json());
}

TEST(Matched, RademacherSkeleton) {
  Measure phi = matched_measure(rademacher(), heis());
  ASSERT_EQ(phi.kind(), Measure::Kind::kMixture);
  ASSERT_EQ(phi.components().size(), 2u);
  for (const auto& c : phi.components()) EXPECT_NEAR(std::abs(to_double(c.offset()[0])), 0.99, 1e-12);
  expect_matched(rademacher(), heis());
  expect_matched(rademacher(), heis(), MatchStrategy::kMoment);
}

TEST(Matched, ThreeAtomsWithLevelTwoMean) {
  Measure mu = Measure::discrete({vec({-2, 1, 0}), vec({1, 1, 1}), vec({1, -2, 0})},
                                 {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  Measure phi = matched_measure(mu, heis());
  EXPECT_EQ(phi.moment(x(2)), Rational(1, 3));
  expect_matched(mu, heis());
  EXPECT_THROW(matched_measure(mu, heis(), MatchStrategy::kSkeleton), MathError);
}

TEST(Matched, RandomMeasuresOnAllCatalogGroups) {
  std::mt19937_64 rng(11);
  for (const auto& name : catalog_names()) {
    const auto& g = catalog_entry(name).algebra;
    for (int t = 0; t < 3; ++t) expect_matched(random_centered(rng, g.dim(), g.basis().dim(1), 3 + t), g);
  }
}

TEST(Matched, RejectsUncentered) {
  EXPECT_THROW(matched_measure(Measure::point_mass(vec({1, 0, 0})), heis()), MathError);
}

TEST(Sampler, EmpiricalMomentsAgreeWithOracle) {
  const auto& basis = heis().basis();
  Measure three = Measure::discrete({vec({-2, 1, 0}), vec({1, 1, 1}), vec({1, -2, 0})},
                                    {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  std::vector<Measure> cases{three, matched_measure(three, heis()), matched_measure(rademacher(), heis())};
  for (const auto& mu : cases) {
    const auto monos = monomials_up_to(basis, 3);
    std::vector<double> sum(monos.size()), sq(monos.size());
    const int n = 1'000'000;
    std::vector<double> s(3);
    for (int i = 0; i < n; ++i) {
      RandomStream rng(2024, 9, 0, static_cast<std::uint32_t>(i));
      mu.sample(rng, s);
      for (std::size_t m = 0; m < monos.size(); ++m) {
        double v = 1.0;
        for (const auto& [var, e] : monos[m].factors()) v *= std::pow(s[var.coord], e);
        sum[m] += v;
        sq[m] += v * v;
      }
    }
    for (std::size_t m = 0; m < monos.size(); ++m) {
      const double mean = sum[m] / n;
      const double se = std::sqrt(std::max(0.0, sq[m] / n - mean * mean) / n);
      EXPECT_LE(std::abs(mean - to_double(mu.moment(monos[m]))), 4.0 * se + 1e-12);
    }
  }
}

TEST(MeasureJson, RoundTripsAndRejectsGarbage) {
  const auto& basis = heis().basis();
  Measure mix = Measure::mixture({rademacher(), unit_box()}, {Rational(1, 4), Rational(3, 4)});
  Measure back = measure_from_json(mix.to_json(), basis);
  EXPECT_EQ(back.to_json(), mix.to_json());
  auto box = measure_from_json(nlohmann::json::parse(R"({"variant":"box","intervals":[["-1/2",0.5],[-1,1],[0,0]]})"), basis);
  EXPECT_EQ(box.moment(x(0, 2)), Rational(1, 12));
  EXPECT_THROW(measure_from_json(nlohmann::json::parse(R"({"variant":"box","intervals":[[0,1]]})"), basis), ConfigError);
  EXPECT_THROW(measure_from_json(nlohmann::json::parse(R"({"variant":"bogus"})"), basis), ConfigError);
  EXPECT_THROW(measure_from_json(nlohmann::json::parse(R"({"variant":"discrete","atoms":[[1,0,0]],"weights":[2]})"), basis),
               ConfigError);
}

}  // namespace
}  // namespace nilwalk
