#include <gtest/gtest.h>

#include <numbers>

#include "nilwalk/catalog.hpp"
#include "nilwalk/rearrange.hpp"
#include "support.hpp"

namespace nilwalk {
namespace {

using testing::random_vector;

ActionElement row(std::vector<int> bits) { return {{std::move(bits)}}; }

TEST(Act, IllustratedArrangements) {
  ActionSpec spec{4, 1, 1, 0, 4};
  std::vector<int> xs{1, 2, 3, 4};
  EXPECT_EQ(act(spec, row({1, 0, 0}), xs), (std::vector<int>{2, 1, 3, 4}));
  EXPECT_EQ(act(spec, row({1, 1, 0}), xs), (std::vector<int>{3, 2, 1, 4}));
  EXPECT_EQ(act(spec, row({0, 1, 1}), xs), (std::vector<int>{4, 3, 1, 2}));
  EXPECT_EQ(act(spec, row({0, 0, 0}), xs), xs);
}

TEST(Act, BlocksAndOffsetsArePreserved) {
  ActionSpec spec{2, 2, 2, 1, 10};
  std::vector<int> xs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  ActionElement tau{{{1}, {0}}};
  EXPECT_EQ(act(spec, tau, xs), (std::vector<int>{0, 3, 4, 1, 2, 5, 6, 7, 8, 9}));
  EXPECT_THROW(act(spec, tau, std::vector<int>(9)), StructuralError);
  EXPECT_THROW((ActionSpec{2, 2, 3, 0, 10}.validate()), std::invalid_argument);
}

TEST(Act, IsGroupActionUnderFactorwiseToggles) {
  for (int n = 2; n <= 3; ++n)
    for (int k = 1; k <= 2; ++k)
      for (int f = 1; f <= 2; ++f) {
        ActionSpec spec{n, k, f, 1, k * n * f + 2};
        std::vector<int> xs(spec.length);
        for (int i = 0; i < spec.length; ++i) xs[i] = i;
        for (std::uint64_t a = 0; a < element_count(spec); ++a)
          for (std::uint64_t b = 0; b < element_count(spec); ++b) {
            auto ta = ActionElement::from_code(spec, a), tb = ActionElement::from_code(spec, b);
            auto moved = act(spec, tb, xs);
            // Toggle, per factor, the order relations selected by ta on the labelled result.
            std::vector<int> relabelled = moved;
            for (int i = 0; i < f; ++i) {
              const int base = spec.offset + i * k * n;
              std::vector<int> order(n);
              for (int p = 0; p < n; ++p) order[p] = (moved[base + p * k] - base) / k;
              auto bits = arrangement_bits(order);
              for (int j = 0; j < n - 1; ++j) bits[j] ^= ta.bits[i][j];
              auto target = block_arrangement(bits);
              for (int p = 0; p < n; ++p)
                for (int j = 0; j < k; ++j) relabelled[base + p * k + j] = base + target[p] * k + j;
            }
            EXPECT_EQ(act(spec, compose(ta, tb), xs), relabelled);
            EXPECT_EQ(compose(compose(ta, tb), tb), ta);
          }
      }
}

const GroupLaw& heis() {
  static GroupLaw law(catalog_entry("heisenberg3").algebra);
  return law;
}
const GroupLaw& free3() {
  static GroupLaw law(catalog_entry("free2step3").algebra);
  return law;
}

TEST(AlternatingSum, CommutatorExample) {
  ActionSpec spec{2, 1, 1, 0, 2};
  std::vector<ExactVector> xs{{1, 0, 0}, {0, 1, 0}};
  auto v = alternating_sum(heis(), spec, row({0}), row({1}), xs, 2);
  EXPECT_EQ(v, (std::vector<Rational>{1}));
  EXPECT_THROW(alternating_sum(heis(), spec, row({0}), row({1}), xs, 3), MathError);
}

TEST(AlternatingSum, LowerLevelsAndEqualElementsVanish) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const bool three = trial % 2 == 1;
    const GroupLaw& law = three ? free3() : heis();
    const int n = three ? 3 : 2;
    ActionSpec spec{n, 1 + trial % 2, 1 + (trial / 2) % 2, trial % 3, 0};
    spec.length = spec.offset + spec.window() + 1;
    std::vector<ExactVector> xs;
    for (int i = 0; i < spec.length; ++i) xs.push_back(random_vector(rng, law.dim()));
    auto t0 = ActionElement::from_code(spec, rng() % element_count(spec));
    auto t1 = ActionElement::from_code(spec, rng() % element_count(spec));
    for (int lower = 1; lower < n; ++lower)
      for (const auto& v : alternating_sum(law, spec, t0, t1, xs, lower)) EXPECT_EQ(v, 0);
    for (const auto& v : alternating_sum(law, spec, t0, t0, xs, n)) EXPECT_EQ(v, 0);
  }
}

TEST(IteratedCommutator, Examples) {
  std::vector<ExactVector> gs{{1, 0, 0}, {0, 1, 0}};
  EXPECT_EQ(iterated_commutator(heis(), gs), (std::vector<Rational>{1}));
  std::vector<ExactVector> same{{2, 3, 1}, {2, 3, 1}};
  EXPECT_EQ(iterated_commutator(heis(), same), (std::vector<Rational>{0}));
  std::vector<ExactVector> x1x2x1{{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {1, 0, 0, 0, 0}};
  EXPECT_EQ(iterated_commutator(free3(), x1x2x1), (std::vector<Rational>{1, 0}));
  EXPECT_THROW(iterated_commutator(heis(), std::vector<ExactVector>(3, ExactVector{1, 0, 0})), MathError);
}

TEST(IteratedCommutator, MatchesSingleBlockSumUpToSign) {
  std::mt19937_64 rng(4);
  for (int n : {2, 3}) {
    const GroupLaw& law = n == 2 ? heis() : free3();
    ActionSpec spec{n, 1, 1, 0, n};
    auto zero = ActionElement::identity(spec), ones = zero;
    for (auto& b : ones.bits[0]) b = 1;
    for (int t = 0; t < 30; ++t) {
      std::vector<ExactVector> gs;
      for (int i = 0; i < n; ++i) gs.push_back(random_vector(rng, law.dim()));
      auto sum = alternating_sum(law, spec, zero, ones, gs, n);
      auto comm = iterated_commutator(law, gs);
      for (std::size_t c = 0; c < sum.size(); ++c) EXPECT_EQ(sum[c], comm[c]);
    }
  }
}

TEST(ActionIdentities, HeisenbergTwoFactors) {
  auto r = verify_action_identities(heis(), ActionSpec{2, 1, 2, 0, 4});
  for (const auto* rep : r.all()) EXPECT_EQ(rep->status, LemmaStatus::kPass) << rep->check << " " << rep->witness.value_or("");
  EXPECT_NE(r.nonvanishing.note.find("aba^-1b^-1"), std::string::npos) << r.nonvanishing.note;
}

TEST(ActionIdentities, FreeStepThree) {
  auto r = verify_action_identities(free3(), ActionSpec{3, 1, 1, 0, 3});
  for (const auto* rep : r.all()) EXPECT_EQ(rep->status, LemmaStatus::kPass) << rep->check << " " << rep->witness.value_or("");
  auto shifted = verify_action_identities(free3(), ActionSpec{2, 1, 1, 1, 3});
  EXPECT_TRUE(shifted.passed());
}

TEST(ActionIdentities, AbelianFailsNonvanishing) {
  GroupLaw law(abelian_algebra({2, 1}));
  auto r = verify_action_identities(law, ActionSpec{2, 1, 1, 0, 2});
  EXPECT_TRUE(r.summation.passed());
  EXPECT_TRUE(r.lower_levels.passed());
  EXPECT_TRUE(r.single_factor.passed());
  ASSERT_EQ(r.nonvanishing.status, LemmaStatus::kFail);
  EXPECT_NE(r.nonvanishing.witness->find("zero polynomial"), std::string::npos);
}

TEST(Gcs, FactorizationAtManyFrequencies) {
  std::vector<ExactVector> atoms{{1, 0, 0}, {Rational(-1, 2), Rational(3, 2), Rational(1, 4)}};
  std::vector<Rational> weights{Rational(1, 3), Rational(2, 3)};
  ActionSpec spec{2, 1, 2, 0, 4};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 20; ++t) {
    FloatVector xi{u(rng), u(rng), u(rng)};
    auto g = gcs_check(heis(), atoms, weights, spec, xi);
    EXPECT_NEAR(g.lhs.real(), g.rhs, 1e-12);
    EXPECT_NEAR(g.lhs.imag(), 0.0, 1e-12);
  }
}

TEST(Gcs, CommutatorCharacteristicFunction) {
  // Two atoms a, b with weight 1/2: the commutator [x,y] is 0 unless the two
  // draws differ, when it is +-(a1 b2 - a2 b1).
  std::vector<ExactVector> atoms{{1, 0, 0}, {0, 1, 0}};
  std::vector<Rational> weights{Rational(1, 2), Rational(1, 2)};
  auto g = gcs_check(heis(), atoms, weights, ActionSpec{2, 1, 1, 0, 2}, FloatVector{0, 0, 0.3});
  const double expected = 0.5 + 0.5 * std::cos(2 * std::numbers::pi * 0.3);
  EXPECT_NEAR(g.commutator_char.real(), expected, 1e-14);
  EXPECT_NEAR(g.rhs, 0.5 + 0.5 * expected, 1e-14);
}

}  // namespace
}  // namespace nilwalk
