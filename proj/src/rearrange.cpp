#include "nilwalk/rearrange.hpp"

#include <cmath>
#include <numbers>

namespace nilwalk {

void ActionSpec::validate() const {
  if (n < 2) throw std::invalid_argument("alternation depth n must be at least 2");
  if (k < 1 || factors < 1) throw std::invalid_argument("block length and factor count must be positive");
  if (offset < 0) throw std::invalid_argument("offset must be nonnegative");
  if (offset + window() > length)
    throw std::invalid_argument("action window [" + std::to_string(offset + 1) + ", " +
                                std::to_string(offset + window()) + "] exceeds sequence length " +
                                std::to_string(length));
}

ActionElement ActionElement::identity(const ActionSpec& spec) {
  return {std::vector<std::vector<int>>(spec.factors, std::vector<int>(spec.n - 1, 0))};
}

ActionElement ActionElement::from_code(const ActionSpec& spec, std::uint64_t code) {
  ActionElement e = identity(spec);
  for (int i = 0; i < spec.factors; ++i)
    for (int j = 0; j < spec.n - 1; ++j) e.bits[i][j] = (code >> (i * (spec.n - 1) + j)) & 1;
  return e;
}

int ActionElement::hamming(int factor) const {
  int h = 0;
  for (int b : bits.at(factor)) h += b;
  return h;
}

std::uint64_t element_count(const ActionSpec& spec) {
  const int total = (spec.n - 1) * spec.factors;
  if (total >= 63) throw ResourceError("action group too large to enumerate");
  return std::uint64_t{1} << total;
}

void check_element(const ActionSpec& spec, const ActionElement& tau) {
  if (static_cast<int>(tau.bits.size()) != spec.factors)
    throw StructuralError("action element has the wrong number of factors");
  for (const auto& row : tau.bits) {
    if (static_cast<int>(row.size()) != spec.n - 1)
      throw StructuralError("action element row has the wrong number of bits");
    for (int b : row)
      if (b != 0 && b != 1) throw StructuralError("action element bits must be 0 or 1");
  }
}

std::vector<int> block_arrangement(const std::vector<int>& bits) {
  std::vector<int> order{0};
  for (std::size_t j = 0; j < bits.size(); ++j) {
    const int block = static_cast<int>(j) + 1;
    if (bits[j]) order.insert(order.begin(), block);
    else order.push_back(block);
  }
  return order;
}

std::vector<int> arrangement_bits(const std::vector<int>& arrangement) {
  const int n = static_cast<int>(arrangement.size());
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[arrangement[p]] = p;
  std::vector<int> bits(n - 1);
  for (int j = 1; j < n; ++j) bits[j - 1] = pos[j] < pos[0] ? 1 : 0;
  if (block_arrangement(bits) != arrangement)
    throw std::invalid_argument("not an arrangement reachable by the action");
  return bits;
}

std::vector<int> action_permutation(const ActionSpec& spec, const ActionElement& tau) {
  spec.validate();
  check_element(spec, tau);
  std::vector<int> perm(spec.length);
  for (int p = 0; p < spec.length; ++p) perm[p] = p;
  const int seg = spec.k * spec.n;
  for (int i = 0; i < spec.factors; ++i) {
    const int base = spec.offset + i * seg;
    const auto order = block_arrangement(tau.bits[i]);
    for (int b = 0; b < spec.n; ++b)
      for (int j = 0; j < spec.k; ++j) perm[base + b * spec.k + j] = base + order[b] * spec.k + j;
  }
  return perm;
}

ActionElement compose(const ActionElement& a, const ActionElement& b) {
  if (a.bits.size() != b.bits.size()) throw StructuralError("action elements of different shapes");
  ActionElement out = a;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    if (a.bits[i].size() != b.bits[i].size()) throw StructuralError("action elements of different shapes");
    for (std::size_t j = 0; j < a.bits[i].size(); ++j) out.bits[i][j] ^= b.bits[i][j];
  }
  return out;
}

ActionElement hybrid(const ActionElement& tau0, const ActionElement& tau1, const std::vector<int>& s) {
  ActionElement out = tau0;
  for (std::size_t i = 0; i < out.bits.size(); ++i)
    for (std::size_t j = 0; j < out.bits[i].size(); ++j)
      out.bits[i][j] = s.at(j) ? tau1.bits[i][j] : tau0.bits[i][j];
  return out;
}

namespace {

// Pi(y) with y_p = x_{perm[p]}: rename sequence index p+1 to perm[p]+1.
Polynomial permuted(const Polynomial& p, const std::vector<int>& perm) {
  return rename(p, [&](SeqVariable v) { return SeqVariable{perm[v.seq - 1] + 1, v.coord}; });
}

using PolyVector = std::vector<Polynomial>;

PolyVector multiply_symbolic(const GroupLaw& law, const PolyVector& a, const PolyVector& b) {
  PolyVector out;
  for (const auto& p : law.polynomials())
    out.push_back(substitute(p, [&](SeqVariable v) -> const Polynomial* {
      return v.seq == kLeftSlot ? &a[v.coord] : &b[v.coord];
    }));
  return out;
}

PolyVector negate(PolyVector v) {
  for (auto& p : v) p = -p;
  return v;
}

PolyVector symbolic_commutator(const GroupLaw& law, const PolyVector& a, const PolyVector& b,
                               CommutatorConvention c) {
  if (c == CommutatorConvention::kLeftFirst)
    return multiply_symbolic(law, multiply_symbolic(law, multiply_symbolic(law, a, b), negate(a)), negate(b));
  return multiply_symbolic(law, multiply_symbolic(law, multiply_symbolic(law, negate(a), negate(b)), a), b);
}

bool is_multilinear(const Polynomial& p, int n, const GradedBasis& basis) {
  for (const auto& [m, c] : p.terms()) {
    if (m.degree() != n || static_cast<int>(m.index_set().size()) != n) return false;
    for (const auto& [v, e] : m.factors())
      if (e != 1 || basis.level_of(v.coord) != 1 || v.seq < 1 || v.seq > n) return false;
  }
  return true;
}

std::string row_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += b ? '1' : '0';
  return s;
}

}  // namespace

std::vector<Polynomial> commutator_polynomial(const GroupLaw& law, int n, std::size_t budget) {
  const auto& basis = law.basis();
  if (n < 1 || n > basis.step()) throw MathError("level " + std::to_string(n) + " does not exist");
  auto pi = expand_product(law, n, budget);
  auto [lo, hi] = basis.level_range(n);
  std::vector<Polynomial> out(hi - lo);
  for (int code = 0; code < (1 << (n - 1)); ++code) {
    std::vector<int> bits(n - 1);
    int weight = 0;
    for (int j = 0; j < n - 1; ++j) weight += bits[j] = (code >> j) & 1;
    const auto order = block_arrangement(bits);
    for (int c = lo; c < hi; ++c) {
      auto p = permuted(pi.full[c], order);
      if (weight % 2 == 0) out[c - lo] += p;
      else out[c - lo] -= p;
    }
  }
  return out;
}

bool ActionIdentityReports::passed() const {
  for (const auto* r : all())
    if (!r->passed()) return false;
  return true;
}

ActionIdentityReports verify_action_identities(const GroupLaw& law, const ActionSpec& spec,
                                               std::size_t budget) {
  spec.validate();
  const auto& basis = law.basis();
  const int n = spec.n;
  if (n > basis.step()) throw MathError("alternation depth exceeds the step of the algebra");
  const nlohmann::json params{{"group", law.algebra().name()}, {"n", n}, {"k", spec.k},
                              {"factors", spec.factors}, {"offset", spec.offset}, {"length", spec.length}};
  ActionIdentityReports out;
  out.summation.check = "summation_formula";
  out.lower_levels.check = "lower_levels_vanish";
  out.single_factor.check = "single_factor_formula";
  out.nonvanishing.check = "single_block_nonvanishing";
  for (auto* r : {&out.summation, &out.lower_levels, &out.single_factor, &out.nonvanishing})
    r->parameters = params;

  auto pi = expand_product(law, spec.length, budget);
  auto [lo, hi] = basis.level_range(n);

  // Commutator polynomial in w_1..w_n and its per-row-pair variants.
  const auto comm = commutator_polynomial(law, n, budget);
  const int rows = 1 << (n - 1);
  auto row_bits = [&](int code) {
    std::vector<int> b(n - 1);
    for (int j = 0; j < n - 1; ++j) b[j] = (code >> j) & 1;
    return b;
  };
  auto piece = expand_product(law, n, budget);
  // single[r0][r1][c]: sum_s (-1)^{|s|} Pi^{(n)}(row_s . w)
  std::vector<std::vector<std::vector<Polynomial>>> single(
      rows, std::vector<std::vector<Polynomial>>(rows, std::vector<Polynomial>(hi - lo)));
  for (int r0 = 0; r0 < rows; ++r0)
    for (int r1 = 0; r1 < rows; ++r1)
      for (int code = 0; code < rows; ++code) {
        const auto s = row_bits(code);
        std::vector<int> bits(n - 1);
        int weight = 0;
        for (int j = 0; j < n - 1; ++j) {
          bits[j] = s[j] ? row_bits(r1)[j] : row_bits(r0)[j];
          weight += s[j];
        }
        const auto order = block_arrangement(bits);
        for (int c = lo; c < hi; ++c) {
          auto p = permuted(piece.full[c], order);
          if (weight % 2 == 0) single[r0][r1][c - lo] += p;
          else single[r0][r1][c - lo] -= p;
        }
      }

  // (c) single-factor formula.
  for (int r0 = 0; r0 < rows; ++r0)
    for (int r1 = 0; r1 < rows; ++r1) {
      const bool complementary = (r0 ^ r1) == rows - 1;
      int weight0 = 0;
      for (int b : row_bits(r0)) weight0 += b;
      for (int c = lo; c < hi; ++c) {
        Polynomial expected;
        if (complementary) expected = weight0 % 2 == 0 ? comm[c - lo] : -comm[c - lo];
        if (single[r0][r1][c - lo] != expected)
          out.single_factor.fail("rows " + row_string(row_bits(r0)) + "/" + row_string(row_bits(r1)) +
                                 " at coordinate " + to_string(basis.label(c)));
      }
    }

  // (d) nonvanishing multilinear commutator polynomial, and its commutator convention.
  for (int c = lo; c < hi; ++c) {
    const auto& p = comm[c - lo];
    if (p.is_zero())
      out.nonvanishing.fail("zero polynomial at coordinate " + to_string(basis.label(c)));
    else if (!is_multilinear(p, n, basis))
      out.nonvanishing.fail("not multilinear in the level-1 block sums at coordinate " +
                            to_string(basis.label(c)));
  }
  if (out.nonvanishing.passed()) {
    std::vector<PolyVector> gs;
    for (int i = 1; i <= n; ++i) {
      PolyVector g;
      for (int c = 0; c < law.dim(); ++c) g.push_back(Polynomial::variable({i, c}));
      gs.push_back(std::move(g));
    }
    std::string matched;
    for (auto conv : {CommutatorConvention::kLeftFirst, CommutatorConvention::kRightFirst}) {
      PolyVector acc = gs[0];
      for (int i = 1; i < n; ++i) acc = symbolic_commutator(law, acc, gs[i], conv);
      for (int sign : {1, -1}) {
        bool same = true;
        for (int c = lo; c < hi && same; ++c)
          same = (sign == 1 ? acc[c] : -acc[c]) == comm[c - lo];
        if (same && matched.empty())
          matched = std::string(conv == CommutatorConvention::kLeftFirst ? "aba^-1b^-1" : "a^-1b^-1ab") +
                    (sign == 1 ? " with sign +1" : " with sign -1");
      }
    }
    out.nonvanishing.note = matched.empty() ? "matches neither commutator convention"
                                            : "equals the iterated commutator for [a,b] = " + matched;
    if (matched.empty()) out.nonvanishing.fail("alternating sum is not an iterated commutator");
  }

  // (a) and (b) over all pairs (tau0, tau1).
  const std::uint64_t count = element_count(spec);
  // Block sums omega_i as polynomials, and per-factor substituted pieces.
  std::vector<PolyVector> omega(n * spec.factors, PolyVector(law.dim()));
  for (int i = 0; i < n * spec.factors; ++i)
    for (int c = 0; c < law.dim(); ++c)
      for (int j = 0; j < spec.k; ++j)
        omega[i][c] += Polynomial::variable({spec.offset + i * spec.k + j + 1, c});
  // factor_piece[i][r0][r1][c]
  std::vector<std::vector<std::vector<std::vector<Polynomial>>>> factor_piece(spec.factors);
  for (int i = 0; i < spec.factors; ++i) {
    factor_piece[i] = single;
    for (auto& a : factor_piece[i])
      for (auto& b : a)
        for (auto& p : b)
          p = substitute(p, [&](SeqVariable v) -> const Polynomial* {
            return &omega[i * n + v.seq - 1][v.coord];
          });
  }
  for (std::uint64_t a = 0; a < count; ++a)
    for (std::uint64_t b = 0; b < count; ++b) {
      const auto tau0 = ActionElement::from_code(spec, a);
      const auto tau1 = ActionElement::from_code(spec, b);
      PolyVector lhs(law.dim());
      for (int code = 0; code < rows; ++code) {
        const auto s = row_bits(code);
        int weight = 0;
        for (int v : s) weight += v;
        const auto perm = action_permutation(spec, hybrid(tau0, tau1, s));
        for (int c = 0; c < law.dim(); ++c) {
          auto p = permuted(pi.full[c], perm);
          if (weight % 2 == 0) lhs[c] += p;
          else lhs[c] -= p;
        }
      }
      const std::string where = "tau0=" + std::to_string(a) + " tau1=" + std::to_string(b);
      for (int c = 0; c < lo; ++c)
        if (!lhs[c].is_zero())
          out.lower_levels.fail(where + " coordinate " + to_string(basis.label(c)));
      for (int c = lo; c < hi; ++c) {
        Polynomial rhs;
        for (int i = 0; i < spec.factors; ++i) {
          int r0 = 0, r1 = 0;
          for (int j = 0; j < n - 1; ++j) {
            r0 |= tau0.bits[i][j] << j;
            r1 |= tau1.bits[i][j] << j;
          }
          rhs += factor_piece[i][r0][r1][c - lo];
        }
        if (lhs[c] != rhs) out.summation.fail(where + " coordinate " + to_string(basis.label(c)));
      }
    }
  return out;
}

GcsCheck gcs_check(const GroupLaw& law, const std::vector<ExactVector>& atoms,
                   const std::vector<Rational>& weights, const ActionSpec& spec, const FloatVector& xi) {
  spec.validate();
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("gcs_check needs matching atoms and weights");
  if (xi.size() != law.dim()) throw StructuralError("frequency dimension mismatch");
  const auto& basis = law.basis();
  const int n = spec.n;
  for (int c = 0; c < law.dim(); ++c)
    if (basis.level_of(c) > n && xi[c] != 0.0)
      throw std::invalid_argument("frequency must vanish above level n");
  const double two_pi = 2.0 * std::numbers::pi;
  auto phase = [&](const ExactVector& v, int sign) {
    double t = 0.0;
    for (int c = 0; c < law.dim(); ++c) t += xi[c] * to_double(v[c]);
    return std::polar(1.0, sign * two_pi * t);
  };
  const int m = static_cast<int>(atoms.size());

  // Left side: all sequences of length N, all pairs (tau0, tau1).
  const std::uint64_t count = element_count(spec);
  std::vector<ActionElement> elems;
  for (std::uint64_t e = 0; e < count; ++e) elems.push_back(ActionElement::from_code(spec, e));
  GcsCheck out;
  std::vector<int> idx(spec.length, 0);
  while (true) {
    Rational w = 1;
    std::vector<ExactVector> xs;
    for (int p = 0; p < spec.length; ++p) {
      w *= weights[idx[p]];
      xs.push_back(atoms[idx[p]]);
    }
    std::complex<double> inner = 0.0;
    for (const auto& t0 : elems)
      for (const auto& t1 : elems) inner += phase(alternating_sum_vector(law, spec, t0, t1, xs), 1);
    out.lhs += to_double(w) * inner / static_cast<double>(count * count);
    int p = 0;
    while (p < spec.length && ++idx[p] == m) idx[p++] = 0;
    if (p == spec.length) break;
  }

  // F_n at xi^{(n)}: law of the commutator polynomial of n i.i.d. k-fold block sums.
  ActionSpec single{n, 1, 1, 0, n};
  auto zero = ActionElement::identity(single);
  auto ones = zero;
  for (auto& b : ones.bits[0]) b = 1;
  FloatVector xi_top = FloatVector::zero(law.dim());
  auto [lo, hi] = basis.level_range(n);
  for (int c = lo; c < hi; ++c) xi_top[c] = xi[c];
  // Distribution of one block sum.
  std::vector<std::pair<ExactVector, Rational>> block{{ExactVector::zero(law.dim()), Rational(1)}};
  for (int j = 0; j < spec.k; ++j) {
    std::vector<std::pair<ExactVector, Rational>> next;
    for (const auto& [v, w] : block)
      for (int a = 0; a < m; ++a) next.push_back({v + atoms[a], w * weights[a]});
    block = std::move(next);
  }
  std::vector<int> bidx(n, 0);
  const int bm = static_cast<int>(block.size());
  std::complex<double> f = 0.0;
  while (true) {
    Rational w = 1;
    std::vector<ExactVector> ws;
    for (int p = 0; p < n; ++p) {
      w *= block[bidx[p]].second;
      ws.push_back(block[bidx[p]].first);
    }
    const auto v = alternating_sum_vector(law, single, zero, ones, ws);
    double t = 0.0;
    for (int c = lo; c < hi; ++c) t += xi_top[c] * to_double(v[c]);
    f += to_double(w) * std::polar(1.0, -two_pi * t);
    int p = 0;
    while (p < n && ++bidx[p] == bm) bidx[p++] = 0;
    if (p == n) break;
  }
  out.commutator_char = f;
  const double h = std::ldexp(1.0, -(n - 1));
  out.rhs = std::pow(1.0 - h + h * f.real(), spec.factors);
  return out;
}

}  // namespace nilwalk
