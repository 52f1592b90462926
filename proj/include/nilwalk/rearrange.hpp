#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "nilwalk/errors.hpp"
#include "nilwalk/group_law.hpp"
#include "nilwalk/product_expansion.hpp"
#include "nilwalk/report.hpp"

namespace nilwalk {

// Block rearrangements on the window [offset+1, offset+k*n*factors] of a
// sequence of length `length`.
struct ActionSpec {
  int n = 2;        // alternation depth
  int k = 1;        // block length
  int factors = 1;  // number of independent C_2^{n-1} factors
  int offset = 0;
  int length = 0;

  int window() const { return k * n * factors; }
  // Throws std::invalid_argument when the window does not fit.
  void validate() const;
};

// One row of n-1 bits per factor.
struct ActionElement {
  std::vector<std::vector<int>> bits;

  static ActionElement identity(const ActionSpec& spec);
  // Element number `code` in a fixed enumeration of all 2^{(n-1) factors}.
  static ActionElement from_code(const ActionSpec& spec, std::uint64_t code);
  int hamming(int factor) const;
  bool operator==(const ActionElement&) const = default;
};

std::uint64_t element_count(const ActionSpec& spec);

// Throws StructuralError if the element does not match the spec.
void check_element(const ActionSpec& spec, const ActionElement& tau);

// Order of the n block labels (0-based) produced by one factor's bits: bit j
// set puts block j+1 in front of blocks 0..j, otherwise behind them.
std::vector<int> block_arrangement(const std::vector<int>& bits);

// Inverse of block_arrangement on arrangements it can produce.
std::vector<int> arrangement_bits(const std::vector<int>& arrangement);

// perm with (tau . xs)[p] = xs[perm[p]], 0-based.
std::vector<int> action_permutation(const ActionSpec& spec, const ActionElement& tau);

template <class T>
std::vector<T> act(const ActionSpec& spec, const ActionElement& tau, const std::vector<T>& xs) {
  if (static_cast<int>(xs.size()) != spec.length)
    throw StructuralError("sequence length does not match the action");
  const auto perm = action_permutation(spec, tau);
  std::vector<T> out;
  out.reserve(xs.size());
  for (int p : perm) out.push_back(xs[p]);
  return out;
}

// The group law of the action: factorwise XOR. Acting by compose(a, b) equals
// acting by b and then toggling, per factor, the relations selected by a.
ActionElement compose(const ActionElement& a, const ActionElement& b);

// tau_s: row i, bit j taken from tau1 if s_j is set, else from tau0.
ActionElement hybrid(const ActionElement& tau0, const ActionElement& tau1, const std::vector<int>& s);

// omega_i = sum of the k vectors in block i of the window.
template <class S>
std::vector<LieVector<S>> block_sums(const ActionSpec& spec, const std::vector<LieVector<S>>& xs) {
  spec.validate();
  std::vector<LieVector<S>> out;
  for (int i = 0; i < spec.n * spec.factors; ++i) {
    LieVector<S> w = xs.at(spec.offset + i * spec.k);
    for (int j = 1; j < spec.k; ++j) w += xs.at(spec.offset + i * spec.k + j);
    out.push_back(std::move(w));
  }
  return out;
}

// Sum over s in {0,1}^{n-1} of (-1)^{|s|} Pi(tau_s . xs), all coordinates.
template <class S>
LieVector<S> alternating_sum_vector(const GroupLaw& law, const ActionSpec& spec,
                                    const ActionElement& tau0, const ActionElement& tau1,
                                    const std::vector<LieVector<S>>& xs) {
  spec.validate();
  check_element(spec, tau0);
  check_element(spec, tau1);
  LieVector<S> total = LieVector<S>::zero(law.dim());
  const int bits = spec.n - 1;
  for (int code = 0; code < (1 << bits); ++code) {
    std::vector<int> s(bits);
    int weight = 0;
    for (int j = 0; j < bits; ++j) weight += s[j] = (code >> j) & 1;
    auto p = product(law, act(spec, hybrid(tau0, tau1, s), xs));
    if (weight % 2 == 0) total += p;
    else total -= p;
  }
  return total;
}

// Level slice of alternating_sum_vector. Throws MathError if the level does
// not exist in the algebra.
template <class S>
std::vector<S> alternating_sum(const GroupLaw& law, const ActionSpec& spec, const ActionElement& tau0,
                               const ActionElement& tau1, const std::vector<LieVector<S>>& xs, int level) {
  if (level < 1 || level > law.basis().step())
    throw MathError("level " + std::to_string(level) + " does not exist");
  return level_slice(law.basis(), alternating_sum_vector(law, spec, tau0, tau1, xs), level);
}

enum class CommutatorConvention {
  kLeftFirst,   // [a,b] = a b a^-1 b^-1
  kRightFirst,  // [a,b] = a^-1 b^-1 a b
};

template <class S>
LieVector<S> group_commutator(const GroupLaw& law, const LieVector<S>& a, const LieVector<S>& b,
                              CommutatorConvention c) {
  if (c == CommutatorConvention::kLeftFirst)
    return law.multiply(law.multiply(law.multiply(a, b), -a), -b);
  return law.multiply(law.multiply(law.multiply(-a, -b), a), b);
}

// Full coordinates of [...[[g1,g2],g3],...,gn].
template <class S>
LieVector<S> iterated_commutator_vector(const GroupLaw& law, const std::vector<LieVector<S>>& gs,
                                        CommutatorConvention c = CommutatorConvention::kLeftFirst) {
  if (gs.size() < 2) throw std::invalid_argument("iterated commutator needs at least two elements");
  LieVector<S> acc = gs[0];
  for (std::size_t i = 1; i < gs.size(); ++i) acc = group_commutator(law, acc, gs[i], c);
  return acc;
}

// Level-n slice of the iterated commutator of n elements. Throws MathError if
// n exceeds the step.
template <class S>
std::vector<S> iterated_commutator(const GroupLaw& law, const std::vector<LieVector<S>>& gs,
                                   CommutatorConvention c = CommutatorConvention::kLeftFirst) {
  const int n = static_cast<int>(gs.size());
  if (n > law.basis().step()) throw MathError("commutator depth exceeds the step");
  return level_slice(law.basis(), iterated_commutator_vector(law, gs, c), n);
}

// Level-n alternating commutator polynomial sum_tau (-1)^{|tau|} Pi^{(n)}(tau . (w_1..w_n))
// in the variables w_i = SeqVariable{i, coord}, one polynomial per level-n coordinate.
std::vector<Polynomial> commutator_polynomial(const GroupLaw& law, int n,
                                              std::size_t budget = kDefaultMonomialBudget);

// Exact symbolic checks of the summation formula, the vanishing of lower
// levels, the single-factor formula and nonvanishing of the commutator
// polynomial, enumerating all pairs (tau0, tau1).
struct ActionIdentityReports {
  LemmaReport summation;
  LemmaReport lower_levels;
  LemmaReport single_factor;
  LemmaReport nonvanishing;
  std::vector<const LemmaReport*> all() const {
    return {&summation, &lower_levels, &single_factor, &nonvanishing};
  }
  bool passed() const;
};

ActionIdentityReports verify_action_identities(const GroupLaw& law, const ActionSpec& spec,
                                               std::size_t budget = kDefaultMonomialBudget);

// Exhaustive check of the factorization
//   E_x E_{tau0,tau1} e_xi(alternating sum of Pi) = (1 - 2^{1-n} + 2^{1-n} Re F_n(xi^{(n)}))^{N'}
// for a finite measure with k = 1 and a window equal to the whole sequence.
struct GcsCheck {
  std::complex<double> lhs;
  double rhs = 0.0;
  std::complex<double> commutator_char;  // F_n at xi^{(n)}
};

GcsCheck gcs_check(const GroupLaw& law, const std::vector<ExactVector>& atoms,
                   const std::vector<Rational>& weights, const ActionSpec& spec, const FloatVector& xi);

}  // namespace nilwalk
