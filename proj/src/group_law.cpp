#include "nilwalk/group_law.hpp"

#include <array>
#include <map>

#include "nilwalk/errors.hpp"

namespace nilwalk {
namespace {

Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Sums (-1)^{n-1} / (n * prod r_i! s_i!) over splittings of word[pos..] into
// n more blocks of the form X^r Y^s, given `blocks` blocks already used.
void dynkin_blocks(const std::vector<int>& word, std::size_t pos, int blocks, const Rational& weight,
                   Rational& total) {
  if (pos == word.size()) {
    Rational term = weight / blocks;
    total += blocks % 2 == 1 ? term : Rational(-term);
    return;
  }
  int r = 0, s = 0;
  for (std::size_t end = pos; end < word.size(); ++end) {
    if (word[end] == 0) {
      if (s > 0) break;  // an X after a Y ends the block shape
      ++r;
    } else {
      ++s;
    }
    dynkin_blocks(word, end + 1, blocks + 1, weight / (factorial(r) * factorial(s)), total);
  }
}

}  // namespace

std::vector<DynkinTerm> dynkin_series(int max_length) {
  std::vector<DynkinTerm> out;
  for (int m = 1; m <= max_length; ++m)
    for (int bits = 0; bits < (1 << m); ++bits) {
      std::vector<int> word(m);
      for (int i = 0; i < m; ++i) word[i] = (bits >> (m - 1 - i)) & 1;
      // Brackets ending in a repeated letter vanish identically.
      if (m >= 2 && word[m - 1] == word[m - 2]) continue;
      Rational total = 0;
      dynkin_blocks(word, 0, 0, Rational(1), total);
      total /= m;
      if (sgn(total) != 0) out.push_back({std::move(word), total});
    }
  return out;
}

namespace {

using PolyVector = LieVector<Polynomial>;

PolyVector variable_vector(int dim, int slot) {
  std::vector<Polynomial> c;
  for (int i = 0; i < dim; ++i) c.push_back(Polynomial::variable({slot, i}));
  return PolyVector(std::move(c));
}

}  // namespace

GroupLaw::GroupLaw(const LieAlgebra& algebra)
    : algebra_(std::make_shared<const LieAlgebra>(algebra)) {
  const int q = algebra_->dim();
  const PolyVector x = variable_vector(q, kLeftSlot);
  const PolyVector y = variable_vector(q, kRightSlot);
  PolyVector z = PolyVector::zero(q);
  std::map<std::vector<int>, PolyVector> nested;  // right-nested bracket of each suffix
  for (const auto& term : dynkin_series(algebra_->step())) {
    const auto& w = term.word;
    PolyVector acc = w.back() == 0 ? x : y;
    for (int i = static_cast<int>(w.size()) - 2; i >= 0; --i) {
      std::vector<int> suffix(w.begin() + i, w.end());
      auto it = nested.find(suffix);
      if (it == nested.end())
        it = nested.emplace(suffix, bracket(*algebra_, w[i] == 0 ? x : y, acc)).first;
      acc = it->second;
    }
    for (int c = 0; c < q; ++c) z[c] += acc[c] * term.coefficient;
  }
  table_ = z.coords();
  compiled_ = CompiledPolynomialMap(table_, [q](SeqVariable v) {
    return v.seq == kLeftSlot ? v.coord : q + v.coord;
  });
}

ExactVector GroupLaw::multiply(const ExactVector& x, const ExactVector& y) const {
  check_dim(*algebra_, x);
  check_dim(*algebra_, y);
  std::vector<Rational> out;
  out.reserve(dim());
  for (const auto& p : table_)
    out.push_back(p.evaluate<Rational>(
        [&](SeqVariable v) -> const Rational& { return v.seq == kLeftSlot ? x[v.coord] : y[v.coord]; }));
  return ExactVector(std::move(out));
}

FloatVector GroupLaw::multiply(const FloatVector& x, const FloatVector& y) const {
  check_dim(*algebra_, x);
  check_dim(*algebra_, y);
  FloatVector out = FloatVector::zero(dim());
  multiply_into(x.coords(), y.coords(), out.coords());
  return out;
}

void GroupLaw::multiply_into(std::span<const double> x, std::span<const double> y,
                             std::span<double> out) const {
  const int q = dim();
  std::array<double, 64> buf;
  std::vector<double> heap;
  double* in = buf.data();
  if (2 * q > static_cast<int>(buf.size())) {
    heap.resize(2 * q);
    in = heap.data();
  }
  std::copy(x.begin(), x.begin() + q, in);
  std::copy(y.begin(), y.begin() + q, in + q);
  compiled_.evaluate(std::span<const double>(in, 2 * q), out);
}

nlohmann::json GroupLaw::to_json() const {
  const auto& b = basis();
  nlohmann::json coords = nlohmann::json::array();
  for (int c = 0; c < dim(); ++c) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, coef] : table_[c].terms()) {
      nlohmann::json mono = nlohmann::json::array();
      for (const auto& [v, e] : m.factors()) {
        const auto& l = b.label(v.coord);
        mono.push_back({{{"var", v.seq == kLeftSlot ? "x" : "y"}, {"label", {l.level, l.index}}}, e});
      }
      nlohmann::json t = rational_to_json_num(coef);
      t["monomial"] = mono;
      terms.push_back(t);
    }
    const auto& l = b.label(c);
    coords.push_back({{"label", {l.level, l.index}}, {"terms", terms}});
  }
  return {{"group", algebra_->name()}, {"dims", b.dims()}, {"coordinates", coords}};
}

namespace {

// a * b for polynomial-valued coordinates.
std::vector<Polynomial> compose_law(const GroupLaw& law, const std::vector<Polynomial>& a,
                                    const std::vector<Polynomial>& b) {
  std::vector<Polynomial> out;
  for (const auto& p : law.polynomials())
    out.push_back(substitute(p, [&](SeqVariable v) -> const Polynomial* {
      return v.seq == kLeftSlot ? &a[v.coord] : &b[v.coord];
    }));
  return out;
}

std::vector<Polynomial> constant_map(const ExactVector& g) {
  std::vector<Polynomial> out;
  for (int c = 0; c < g.size(); ++c) out.emplace_back(g[c]);
  return out;
}

}  // namespace

std::vector<Polynomial> identity_map(int dim) { return variable_vector(dim, kLeftSlot).coords(); }

std::vector<Polynomial> compose_maps(const std::vector<Polynomial>& outer,
                                     const std::vector<Polynomial>& inner) {
  std::vector<Polynomial> out;
  for (const auto& p : outer)
    out.push_back(substitute(p, [&](SeqVariable v) -> const Polynomial* {
      if (v.seq != kLeftSlot || v.coord >= static_cast<int>(inner.size()))
        throw StructuralError("compose_maps: variable outside the inner map");
      return &inner[v.coord];
    }));
  return out;
}

TranslationPolynomials translate_polynomials(const GroupLaw& law, const ExactVector& g,
                                             const ExactVector& h) {
  check_dim(law.algebra(), g);
  check_dim(law.algebra(), h);
  const int q = law.dim();
  const auto& basis = law.basis();
  TranslationPolynomials t;
  t.p = compose_law(law, compose_law(law, constant_map(g), identity_map(q)), constant_map(h));
  t.height = 0;
  for (const auto& p : t.p) t.height = std::max<Rational>(t.height, p.height());

  // p^{(n)} = x^{(n)} + r_n(x^{(<n)}), so q^{(n)} = x'^{(n)} - r_n(q^{(<n)}).
  t.q.assign(q, Polynomial());
  for (int level = 1; level <= basis.step(); ++level) {
    auto [lo, hi] = basis.level_range(level);
    for (int c = lo; c < hi; ++c) {
      Polynomial rest = t.p[c] - Polynomial::variable({kLeftSlot, c});
      for (const auto& [m, coef] : rest.terms())
        for (const auto& [v, e] : m.factors())
          if (basis.level_of(v.coord) >= level)
            throw MathError("translation is not triangular in the grading");
      t.q[c] = Polynomial::variable({kLeftSlot, c}) - compose_maps({rest}, t.q).front();
    }
  }
  return t;
}

}  // namespace nilwalk
