#include "nilwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

#include <Eigen/Dense>

#include "nilwalk/errors.hpp"
#include "nilwalk/rearrange.hpp"

namespace nilwalk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint32_t sample_id(std::uint64_t i) {
  if (i > 0xffffffffULL) throw ResourceError("sample index exceeds the stream id range");
  return static_cast<std::uint32_t>(i);
}

// Per-thread buffers for one walk.
struct WalkBuffers {
  std::vector<double> acc, step, tmp;
  void resize(int dim) {
    acc.resize(dim);
    step.resize(dim);
    tmp.resize(dim);
  }
};

WalkBuffers& buffers(int dim) {
  thread_local WalkBuffers b;
  b.resize(dim);
  return b;
}

// Draws a walk of length n and leaves the product in b.acc.
void draw_walk(const GroupLaw& law, const Measure& mu, RandomStream& rng, int n, WalkBuffers& b) {
  mu.sample(rng, b.acc);
  for (int k = 1; k < n; ++k) {
    mu.sample(rng, b.step);
    law.multiply_into(b.acc, b.step, b.tmp);
    std::swap(b.acc, b.tmp);
  }
}

void dilate_in_place(const GradedBasis& basis, std::span<double> x, double r) {
  double power = r;
  for (int level = 1; level <= basis.step(); ++level) {
    auto [lo, hi] = basis.level_range(level);
    for (int c = lo; c < hi; ++c) x[c] *= power;
    power *= r;
  }
}

bool is_zero_vector(const FloatVector& v) {
  for (int c = 0; c < v.size(); ++c)
    if (v[c] != 0.0) return false;
  return true;
}

double level_norm(const GradedBasis& basis, std::span<const double> x, int level) {
  auto [lo, hi] = basis.level_range(level);
  double s = 0.0;
  for (int c = lo; c < hi; ++c) s += x[c] * x[c];
  return std::sqrt(s);
}

std::uint64_t round_chunks(double n) {
  const double chunks = std::ceil(n / static_cast<double>(kChunkSize));
  return static_cast<std::uint64_t>(std::max(1.0, chunks)) * kChunkSize;
}

struct CountAccumulator {
  std::uint64_t n = 0, hits = 0;
  void merge(const CountAccumulator& o) {
    n += o.n;
    hits += o.hits;
  }
};

// Samples [first, first + count) of every stochastic leg, growing the
// count until the combined error is below the noise budget.
template <class Acc, class RangeFn, class ValueFn>
GapPoint adaptive_gap(int n, const std::vector<std::optional<std::complex<double>>>& exact, RangeFn&& range,
                      ValueFn&& value, const NoiseBudget& budget) {
  GapPoint pt;
  pt.n = n;
  std::vector<Acc> acc(exact.size());
  std::uint64_t target = round_chunks(static_cast<double>(budget.initial_samples));
  const std::uint64_t cap = std::max(target, round_chunks(static_cast<double>(budget.max_samples)));
  while (true) {
    std::complex<double> v[2];
    double se[2] = {0.0, 0.0};
    for (std::size_t leg = 0; leg < exact.size(); ++leg) {
      if (exact[leg]) {
        v[leg] = *exact[leg];
        continue;
      }
      if (acc[leg].count() < target) {
        Acc more = range(leg, acc[leg].count(), target - acc[leg].count());
        acc[leg].merge(more);
      }
      std::tie(v[leg], se[leg]) = value(acc[leg]);
    }
    pt.gap = std::abs(v[0] - v[1]);
    pt.std_error = std::hypot(se[0], se[1]);
    pt.mu_value = v[0].real();
    pt.phi_value = v[1].real();
    pt.mu_std_error = se[0];
    pt.phi_std_error = se[1];
    const double allowed = budget.noise_fraction * pt.gap;
    if (pt.std_error <= allowed) break;
    if (target >= cap) {
      pt.noise_ok = false;
      break;
    }
    const double ratio = allowed > 0.0 ? pt.std_error / allowed : 1e9;
    const double wanted = static_cast<double>(target) * std::max(1.5, 1.1 * ratio * ratio);
    target = std::min(cap, round_chunks(std::min(wanted, static_cast<double>(cap))));
  }
  pt.mu_samples = exact[0] ? 0 : acc[0].count();
  pt.phi_samples = exact[1] ? 0 : acc[1].count();
  pt.samples = pt.mu_samples + pt.phi_samples;
  pt.mu_method = exact[0] ? "exact" : "monte-carlo";
  return pt;
}

}  // namespace

FrequencyWindow FrequencyWindow::standard(int step) {
  FrequencyWindow w;
  for (int n = 1; n <= step; ++n) w.epsilons.push_back(std::pow(4.0, step - n) * 1e-2);
  return w;
}

bool FrequencyWindow::chain_holds() const {
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) return false;
    if (i + 1 < epsilons.size() && !(epsilons[i] > static_cast<double>(i + 1) * epsilons[i + 1])) return false;
  }
  return true;
}

bool FrequencyWindow::contains(const GradedBasis& basis, std::span<const double> xi, int n) const {
  if (static_cast<int>(epsilons.size()) != basis.step()) throw StructuralError("window does not match the step");
  for (int level = 1; level <= basis.step(); ++level) {
    const double scale = std::pow(static_cast<double>(n), 0.5 * level - epsilons[level - 1]);
    if (level_norm(basis, xi, level) * scale > 1.0) return false;
  }
  return true;
}

std::vector<double> scaled_frequency(const GradedBasis& basis, std::span<const double> eta, int n) {
  if (static_cast<int>(eta.size()) != basis.total_dim()) throw StructuralError("frequency has the wrong dimension");
  std::vector<double> xi(eta.begin(), eta.end());
  dilate_in_place(basis, xi, 1.0 / std::sqrt(static_cast<double>(n)));
  return xi;
}

void sample_string(const Measure& mu, RandomStream& rng, int n, std::vector<double>& out) {
  const int dim = mu.dim();
  out.resize(static_cast<std::size_t>(n) * dim);
  for (int k = 0; k < n; ++k) mu.sample(rng, std::span<double>(out.data() + k * dim, dim));
}

void walk_product(const GroupLaw& law, const std::vector<double>& xs, int n, std::vector<double>& scratch,
                  std::span<double> out) {
  const int dim = law.dim();
  if (n < 1 || xs.size() < static_cast<std::size_t>(n) * dim) throw std::invalid_argument("walk_product: bad length");
  scratch.resize(dim);
  std::copy_n(xs.begin(), dim, out.begin());
  for (int k = 1; k < n; ++k) {
    law.multiply_into(out, std::span<const double>(xs.data() + k * dim, dim), scratch);
    std::copy(scratch.begin(), scratch.end(), out.begin());
  }
}

Accumulator walk_functional_range(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                  const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                                  const WalkOptions& opt, std::uint64_t first, std::uint64_t count) {
  if (n < 1) throw std::invalid_argument("walk length must be positive");
  const int dim = law.dim();
  if (mu.dim() != dim || g.size() != dim || h.size() != dim || f.dim != dim)
    throw StructuralError("walk functional: dimensions do not match the group");
  const bool left = !is_zero_vector(g), right = !is_zero_vector(h);
  const double r = opt.scaled ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  return run_chunked<Accumulator>(first, first + count, ctx.threads, [&](std::uint64_t i, Accumulator& acc) {
    RandomStream rng(ctx.seed, ctx.experiment, opt.leg, sample_id(i));
    WalkBuffers& b = buffers(dim);
    draw_walk(law, mu, rng, n, b);
    if (opt.scaled) dilate_in_place(law.basis(), b.acc, r);
    if (left) {
      law.multiply_into(g.coords(), b.acc, b.tmp);
      std::swap(b.acc, b.tmp);
    }
    if (right) {
      law.multiply_into(b.acc, h.coords(), b.tmp);
      std::swap(b.acc, b.tmp);
    }
    acc.add(f(b.acc));
  });
}

EstimateWithError walk_functional(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                  const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                                  bool scaled, std::uint64_t samples) {
  return walk_functional_range(ctx, law, mu, n, f, g, h, {scaled, 0}, 0, samples).estimate(ctx.seed);
}

ComplexAccumulator char_fn_range(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                 std::span<const double> xi, std::uint32_t leg, std::uint64_t first,
                                 std::uint64_t count) {
  if (n < 1) throw std::invalid_argument("walk length must be positive");
  const int dim = law.dim();
  if (mu.dim() != dim || static_cast<int>(xi.size()) != dim)
    throw StructuralError("characteristic function: dimensions do not match the group");
  return run_chunked<ComplexAccumulator>(first, first + count, ctx.threads,
                                         [&](std::uint64_t i, ComplexAccumulator& acc) {
                                           RandomStream rng(ctx.seed, ctx.experiment, leg, sample_id(i));
                                           WalkBuffers& b = buffers(dim);
                                           draw_walk(law, mu, rng, n, b);
                                           double t = 0.0;
                                           for (int c = 0; c < dim; ++c) t += xi[c] * b.acc[c];
                                           acc.add(std::polar(1.0, kTwoPi * t));
                                         });
}

std::optional<std::complex<double>> enumerate_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                      std::span<const double> xi) {
  if (mu.kind() != Measure::Kind::kDiscrete || n < 1) return std::nullopt;
  const int k = static_cast<int>(mu.atoms().size());
  if (std::pow(static_cast<double>(k), n) > kEnumerationLimit) return std::nullopt;
  const int dim = law.dim();
  std::vector<std::vector<double>> atoms;
  std::vector<double> w;
  for (int a = 0; a < k; ++a) {
    atoms.push_back(to_float(mu.atoms()[a]).coords());
    w.push_back(to_double(mu.weights()[a]));
  }
  // prefix products, one buffer per depth
  std::vector<std::vector<double>> prefix(n + 1, std::vector<double>(dim, 0.0));
  std::complex<double> total = 0.0;
  auto rec = [&](auto&& self, int depth, double weight) -> void {
    if (depth == n) {
      double t = 0.0;
      for (int c = 0; c < dim; ++c) t += xi[c] * prefix[n][c];
      total += weight * std::polar(1.0, kTwoPi * t);
      return;
    }
    for (int a = 0; a < k; ++a) {
      if (depth == 0) prefix[1] = atoms[a];
      else law.multiply_into(prefix[depth], atoms[a], prefix[depth + 1]);
      self(self, depth + 1, weight * w[a]);
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

std::optional<std::complex<double>> step_two_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                     std::span<const double> xi) {
  const auto& basis = law.basis();
  if (mu.kind() != Measure::Kind::kDiscrete || basis.step() > 2 || n < 1) return std::nullopt;
  const int d1 = basis.dim(1), q = basis.total_dim();
  const int k = static_cast<int>(mu.atoms().size());
  // level-1 coordinates on a common integer grid
  mpz_class den = 1;
  for (const auto& a : mu.atoms())
    for (int c = 0; c < d1; ++c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), a[c].get_den_mpz_t());
  std::vector<std::vector<long>> steps(k, std::vector<long>(d1));
  std::vector<double> base_phase(k), w(k);
  std::vector<std::vector<double>> level1(k, std::vector<double>(d1));
  for (int a = 0; a < k; ++a) {
    const auto& atom = mu.atoms()[a];
    double t = 0.0;
    for (int c = 0; c < q; ++c) t += xi[c] * to_double(atom[c]);
    base_phase[a] = t;
    w[a] = to_double(mu.weights()[a]);
    for (int c = 0; c < d1; ++c) {
      mpz_class v = atom[c].get_num() * (den / atom[c].get_den());
      if (!v.fits_slong_p()) return std::nullopt;
      steps[a][c] = v.get_si();
      level1[a][c] = to_double(atom[c]);
    }
  }
  // phase of 1/2 [S, x] against the level-2 frequency: S^T M x
  std::vector<double> form(d1 * d1, 0.0);
  if (basis.step() == 2) {
    auto [lo, hi] = basis.level_range(2);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int c = lo; c < hi; ++c) form[i * d1 + j] += 0.5 * xi[c] * to_double(law.algebra().constants().at(i, j, c));
  }
  const double scale = 1.0 / den.get_d();
  std::map<std::vector<long>, std::complex<double>> layer{{std::vector<long>(d1, 0), 1.0}};
  for (int step = 0; step < n; ++step) {
    std::map<std::vector<long>, std::complex<double>> next;
    for (const auto& [s, amp] : layer) {
      for (int a = 0; a < k; ++a) {
        double t = base_phase[a];
        for (int i = 0; i < d1; ++i) {
          if (s[i] == 0) continue;
          double row = 0.0;
          for (int j = 0; j < d1; ++j) row += form[i * d1 + j] * level1[a][j];
          t += static_cast<double>(s[i]) * scale * row;
        }
        std::vector<long> key = s;
        for (int i = 0; i < d1; ++i) key[i] += steps[a][i];
        next[key] += amp * w[a] * std::polar(1.0, kTwoPi * t);
      }
    }
    layer = std::move(next);
  }
  std::complex<double> total = 0.0;
  for (const auto& [s, amp] : layer) total += amp;
  return total;
}

std::optional<std::complex<double>> exact_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                  std::span<const double> xi) {
  if (auto e = enumerate_char_fn(law, mu, n, xi)) return e;
  return step_two_char_fn(law, mu, n, xi);
}

ComplexEstimate char_fn_estimate(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                 std::span<const double> xi, std::uint64_t samples, bool monte_carlo) {
  if (!monte_carlo) {
    if (auto e = enumerate_char_fn(law, mu, n, xi)) {
      const auto strings = static_cast<std::uint64_t>(std::pow(static_cast<double>(mu.atoms().size()), n));
      return {*e, 0.0, strings, ctx.seed, true};
    }
  }
  return char_fn_range(ctx, law, mu, n, xi, 0, 0, samples).estimate(ctx.seed);
}

nlohmann::json NoiseBudget::to_json() const {
  return {{"initial_samples", initial_samples}, {"max_samples", max_samples}, {"noise_fraction", noise_fraction}};
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"N", p.n},
                   {"gap", p.gap},
                   {"std_error", p.std_error},
                   {"samples", p.samples},
                   {"noise_ok", p.noise_ok},
                   {"mu_value", p.mu_value},
                   {"phi_value", p.phi_value},
                   {"mu_std_error", p.mu_std_error},
                   {"phi_std_error", p.phi_std_error},
                   {"mu_samples", p.mu_samples},
                   {"phi_samples", p.phi_samples},
                   {"mu_method", p.mu_method}});
  nlohmann::json j = {{"quantity", quantity},         {"points", pts},
                      {"target_slope", target_slope}, {"inconclusive", inconclusive},
                      {"degenerate", degenerate},     {"noise_budget", budget.to_json()}};
  if (fit) j["fit"] = fit->to_json();
  return j;
}

void fit_decay(DecayReport& report) {
  report.inconclusive = false;
  report.degenerate = false;
  std::vector<double> x, y, se;
  for (const auto& p : report.points) {
    if (!p.noise_ok) report.inconclusive = true;
    // gaps at roundoff level count as zero
    if (p.gap <= 1e-12) report.degenerate = true;
    x.push_back(p.n);
    y.push_back(p.gap);
    se.push_back(p.std_error);
  }
  report.fit.reset();
  if (!report.degenerate && x.size() >= 3) report.fit = fit_power_law(x, y, se);
}

GapPoint lindeberg_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi, int n,
                         std::span<const double> eta, const NoiseBudget& budget) {
  const auto xi = scaled_frequency(law.basis(), eta, n);
  std::vector<std::optional<std::complex<double>>> exact{exact_char_fn(law, mu, n, xi),
                                                         exact_char_fn(law, phi, n, xi)};
  const Measure* legs[2] = {&mu, &phi};
  return adaptive_gap<ComplexAccumulator>(
      n, exact,
      [&](std::size_t leg, std::uint64_t first, std::uint64_t count) {
        return char_fn_range(ctx, law, *legs[leg], n, xi, static_cast<std::uint32_t>(leg), first, count);
      },
      [&](const ComplexAccumulator& a) {
        auto e = a.estimate(ctx.seed);
        return std::pair{e.mean, e.std_error};
      },
      budget);
}

DecayReport lindeberg_gap(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi,
                          const std::vector<int>& schedule, std::span<const double> eta, const NoiseBudget& budget) {
  DecayReport r;
  r.quantity = "lindeberg_gap";
  r.target_slope = -1.0;
  r.budget = budget;
  for (int n : schedule) r.points.push_back(lindeberg_point(ctx, law, mu, phi, n, eta, budget));
  fit_decay(r);
  return r;
}

GapPoint llt_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi, int n,
                   const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h, const NoiseBudget& budget) {
  std::vector<std::optional<std::complex<double>>> exact(2);
  const Measure* legs[2] = {&mu, &phi};
  return adaptive_gap<Accumulator>(
      n, exact,
      [&](std::size_t leg, std::uint64_t first, std::uint64_t count) {
        return walk_functional_range(ctx, law, *legs[leg], n, f, g, h, {true, static_cast<std::uint32_t>(leg)},
                                     first, count);
      },
      [](const Accumulator& a) { return std::pair{std::complex<double>(a.mean()), a.std_error()}; }, budget);
}

DecayReport llt_gap(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi,
                    const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                    const std::vector<int>& schedule, const NoiseBudget& budget) {
  DecayReport r;
  r.quantity = "llt_gap";
  r.target_slope = -0.5;
  r.budget = budget;
  for (int n : schedule) r.points.push_back(llt_point(ctx, law, mu, phi, n, f, g, h, budget));
  fit_decay(r);
  return r;
}

namespace {

// Combination of U-statistics on a row-major string of n vectors.
double evaluate_statistic(const UDecomposition& stat, const std::vector<double>& xs, int n, int dim,
                          std::vector<double>& dp) {
  double total = 0.0;
  for (const auto& [spec, coef] : stat.terms) {
    const int r = spec.order();
    dp.assign(r + 1, 0.0);
    dp[0] = 1.0;
    for (int l = 0; l < n; ++l) {
      const double* x = xs.data() + static_cast<std::size_t>(l) * dim;
      for (int j = std::min(r, l + 1); j >= 1; --j) {
        double v = 1.0;
        for (const auto& [c, e] : spec.blocks[j - 1])
          for (int t = 0; t < e; ++t) v *= x[c];
        dp[j] += dp[j - 1] * v;
      }
    }
    total += to_double(coef) * dp[r];
  }
  return total;
}

struct GrowthAccumulator {
  Accumulator moment, tail;
  std::uint64_t nonzero = 0;
  void merge(const GrowthAccumulator& o) {
    moment.merge(o.moment);
    tail.merge(o.tail);
    nonzero += o.nonzero;
  }
};

}  // namespace

std::optional<double> level_one_closed_form(const UDecomposition& stat, const Measure& mu, const GradedBasis& basis,
                                            int m, int n) {
  if (m != 1) return std::nullopt;
  std::vector<Rational> w(basis.total_dim());
  for (const auto& [spec, coef] : stat.terms) {
    if (spec.order() != 1 || spec.blocks[0].size() != 1) return std::nullopt;
    const auto [c, e] = spec.blocks[0][0];
    if (e != 1 || basis.level_of(c) != 1) return std::nullopt;
    w[c] += coef;
  }
  Rational first = 0, second = 0;
  for (int a = 0; a < basis.total_dim(); ++a) {
    if (sgn(w[a]) == 0) continue;
    first += w[a] * mu.moment(Monomial::variable({1, a}));
    for (int b = 0; b < basis.total_dim(); ++b)
      if (sgn(w[b]) != 0) second += w[a] * w[b] * mu.moment(Monomial::variable({1, a}) * Monomial::variable({1, b}));
  }
  return to_double(Rational(n * second + Rational(n) * (n - 1) * first * first));
}

GrowthPoint moment_growth_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                const UDecomposition& stat, int m, int n, std::uint64_t samples,
                                double tail_fraction) {
  const auto& basis = law.basis();
  if (m < 1 || n < 1) throw std::invalid_argument("moment growth needs m, N >= 1");
  if (stat.terms.empty()) throw std::invalid_argument("empty statistic");
  const int degree = stat.terms.front().first.homogeneous_degree(basis);
  for (const auto& [spec, c] : stat.terms) {
    validate_ustatistic(spec, basis);
    if (spec.homogeneous_degree(basis) != degree) throw StructuralError("statistic mixes homogeneous degrees");
  }
  const int dim = law.dim();
  const int tail_len = degree <= basis.step() ? std::clamp(static_cast<int>(std::lround(tail_fraction * n)), 1, n) : 0;
  const double norm = tail_len > 0 ? std::pow(static_cast<double>(n), m * degree) *
                                         std::pow(static_cast<double>(tail_len) / n, m)
                                   : 1.0;
  auto acc = run_chunked<GrowthAccumulator>(0, samples, ctx.threads, [&](std::uint64_t i, GrowthAccumulator& a) {
    RandomStream rng(ctx.seed, ctx.experiment, 0, sample_id(i));
    thread_local std::vector<double> xs, dp, scratch, full, tail;
    sample_string(mu, rng, n, xs);
    const double u = evaluate_statistic(stat, xs, n, dim, dp);
    if (u != 0.0) ++a.nonzero;
    a.moment.add(std::pow(std::abs(u), 2 * m));
    if (tail_len > 0) {
      full.resize(dim);
      tail.assign(dim, 0.0);
      walk_product(law, xs, n, scratch, full);
      if (tail_len < n) {
        std::vector<double> rest(xs.begin() + static_cast<std::ptrdiff_t>(tail_len) * dim, xs.end());
        walk_product(law, rest, n - tail_len, scratch, tail);
      }
      auto [lo, hi] = basis.level_range(degree);
      double d2 = 0.0;
      for (int c = lo; c < hi; ++c) d2 += (full[c] - tail[c]) * (full[c] - tail[c]);
      a.tail.add(std::pow(d2, m) / norm);
    }
  });
  GrowthPoint pt;
  pt.n = n;
  pt.moment = acc.moment.estimate(ctx.seed);
  pt.closed_form = level_one_closed_form(stat, mu, basis, m, n);
  pt.tail_length = tail_len;
  pt.tail_ratio = acc.tail.estimate(ctx.seed);
  if (acc.nonzero == 0) pt.moment = {0.0, 0.0, samples, ctx.seed};
  return pt;
}

nlohmann::json MomentGrowthReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j = {{"N", p.n},
                        {"moment", p.moment.to_json()},
                        {"tail_length", p.tail_length},
                        {"tail_ratio", p.tail_ratio.to_json()}};
    if (p.closed_form) j["closed_form"] = *p.closed_form;
    pts.push_back(j);
  }
  nlohmann::json j = {{"m", m}, {"degree", degree}, {"points", pts}, {"target_slope", target_slope}, {"zero", zero}};
  if (fit) j["fit"] = fit->to_json();
  return j;
}

MomentGrowthReport moment_growth(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                 const UDecomposition& stat, int m, const std::vector<int>& schedule,
                                 std::uint64_t samples, double tail_fraction) {
  MomentGrowthReport r;
  r.m = m;
  r.degree = stat.terms.empty() ? 0 : stat.terms.front().first.homogeneous_degree(law.basis());
  r.target_slope = static_cast<double>(m * r.degree);
  std::vector<double> x, y, se;
  r.zero = true;
  for (int n : schedule) {
    r.points.push_back(moment_growth_point(ctx, law, mu, stat, m, n, samples, tail_fraction));
    const auto& p = r.points.back();
    if (p.moment.mean > 0.0) r.zero = false;
    x.push_back(n);
    y.push_back(p.moment.mean);
    se.push_back(p.moment.std_error);
  }
  const bool positive = std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
  if (!r.zero && positive && x.size() >= 3) r.fit = fit_power_law(x, y, se);
  return r;
}

nlohmann::json TailReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"N", p.n}, {"exceedances", p.exceedances}, {"samples", p.samples}, {"probability", p.probability()}});
  return {{"delta", delta}, {"points", pts}, {"nonincreasing", nonincreasing}};
}

TailPoint truncation_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n, double delta,
                           std::uint64_t samples) {
  if (!(delta > 0.0)) throw std::invalid_argument("truncation check needs delta > 0");
  const auto& basis = law.basis();
  const int dim = law.dim();
  const double threshold = std::pow(static_cast<double>(n), delta);
  auto acc = run_chunked<CountAccumulator>(0, samples, ctx.threads, [&](std::uint64_t i, CountAccumulator& a) {
    RandomStream rng(ctx.seed, ctx.experiment, 0, sample_id(i));
    WalkBuffers& b = buffers(dim);
    draw_walk(law, mu, rng, n, b);
    double worst = 0.0;
    for (int level = 1; level <= basis.step(); ++level)
      worst = std::max(worst, level_norm(basis, b.acc, level) / std::pow(static_cast<double>(n), 0.5 * level));
    ++a.n;
    if (worst > threshold) ++a.hits;
  });
  return {n, acc.hits, acc.n};
}

TailReport truncation_tail_check(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                 const std::vector<int>& schedule, double delta, std::uint64_t samples) {
  TailReport r;
  r.delta = delta;
  for (int n : schedule) {
    r.points.push_back(truncation_point(ctx, law, mu, n, delta, samples));
    if (r.points.size() > 1 && r.points.back().probability() > r.points[r.points.size() - 2].probability())
      r.nonincreasing = false;
  }
  return r;
}

namespace {

// Coefficients c_0..c_d of a univariate polynomial in variable `var`, the
// other variable fixed at `other` (coordinate 1 - var).
std::vector<double> univariate(const Polynomial& p, int var, double other) {
  std::vector<double> c;
  for (const auto& [m, coef] : p.terms()) {
    int e_var = 0, e_other = 0;
    for (const auto& [v, e] : m.factors()) {
      if (v.coord == var) e_var = e;
      else e_other = e;
    }
    if (static_cast<int>(c.size()) <= e_var) c.resize(e_var + 1, 0.0);
    c[e_var] += to_double(coef) * std::pow(other, e_other);
  }
  if (c.empty()) c.push_back(0.0);
  return c;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

void add_roots(std::vector<double> c, std::vector<double>& out) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return;
  if (d == 1) {
    out.push_back(-c[0] / c[1]);
    return;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (int i = 0; i < d; ++i) {
    const auto z = es.eigenvalues()(i);
    out.push_back(z.real());
    // polish with a few Newton steps on the real part
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      double fv = 0.0, dv = 0.0;
      for (int k = d; k >= 0; --k) {
        dv = dv * x + fv;
        fv = fv * x + c[k];
      }
      if (dv == 0.0) break;
      x -= fv / dv;
    }
    out.push_back(x);
  }
}

// Length of {x in [-1/2, 1/2] : |p(x)| <= alpha}.
double interval_measure(const std::vector<double>& c, double alpha) {
  std::vector<double> cuts{-0.5, 0.5};
  auto shifted = c;
  shifted[0] = c[0] - alpha;
  add_roots(shifted, cuts);
  shifted[0] = c[0] + alpha;
  add_roots(shifted, cuts);
  std::erase_if(cuts, [](double x) { return !(x >= -0.5 && x <= 0.5); });
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= lo) continue;
    if (std::abs(horner(c, 0.5 * (lo + hi))) <= alpha) total += hi - lo;
  }
  return total;
}

double halton(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  for (; i > 0; i /= base) {
    f /= base;
    r += f * static_cast<double>(i % base);
  }
  return r;
}

}  // namespace

double sublevel_measure(const std::vector<Polynomial>& p, int q, double alpha) {
  if (q < 1) throw std::invalid_argument("sublevel measure needs q >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("sublevel measure needs alpha >= 0");
  for (const auto& comp : p)
    for (const auto& [m, c] : comp.terms())
      for (const auto& [v, e] : m.factors())
        if (v.seq != 1 || v.coord >= q) throw StructuralError("polynomial uses a variable outside the box");
  if (p.size() == 1 && q == 1) return interval_measure(univariate(p[0], 0, 0.0), alpha);
  if (p.size() == 1 && q == 2) {
    bool uses[2] = {false, false};
    for (const auto& [m, c] : p[0].terms())
      for (const auto& [v, e] : m.factors()) uses[v.coord] = true;
    // a polynomial in one coordinate has a discontinuous outer integrand
    if (!uses[1]) return interval_measure(univariate(p[0], 0, 0.0), alpha);
    if (!uses[0]) return interval_measure(univariate(p[0], 1, 0.0), alpha);
    // composite Gauss-Legendre over the first coordinate
    static const double nodes[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
    static const double weights[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
    const int panels = 512;
    const double h = 1.0 / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double mid = -0.5 + (k + 0.5) * h;
      for (int j = 0; j < 8; ++j) {
        const double x1 = mid + 0.5 * h * nodes[j];
        total += 0.5 * h * weights[j] * interval_measure(univariate(p[0], 1, x1), alpha);
      }
    }
    return total;
  }
  // quasi-Monte Carlo for maps and higher dimensions
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (q > 8) throw ResourceError("sublevel measure supports q <= 8");
  const std::uint64_t count = 1u << 18;
  std::uint64_t hits = 0;
  std::vector<double> x(q);
  for (std::uint64_t i = 1; i <= count; ++i) {
    for (int c = 0; c < q; ++c) x[c] = halton(i, primes[c]) - 0.5;
    double s = 0.0;
    for (const auto& comp : p) {
      const double v = comp.evaluate<double>([&](SeqVariable var) { return x[var.coord]; });
      s += v * v;
    }
    if (std::sqrt(s) <= alpha) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(count);
}

nlohmann::json SublevelReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"alpha", p.alpha}, {"scale", p.scale}, {"measure", p.measure}, {"ratio", p.ratio}});
  return {{"q", q},
          {"degree", degree},
          {"height", height},
          {"points", pts},
          {"median_ratio", median_ratio},
          {"max_ratio", max_ratio},
          {"spread", spread}};
}

SublevelReport sublevel_check(const std::vector<Polynomial>& p, int q, const std::vector<double>& alphas,
                              const std::vector<double>& scales) {
  SublevelReport r;
  r.q = q;
  r.degree = 0;
  Rational ht = 0;
  for (const auto& comp : p) {
    r.degree = std::max(r.degree, comp.degree());
    ht = std::max(ht, comp.height());
  }
  if (r.degree < 1) throw MathError("sublevel check needs a nonconstant polynomial");
  r.height = to_double(ht);
  const double inv_s = 1.0 / r.degree;
  std::vector<double> ratios;
  for (double scale : scales)
    for (double alpha : alphas) {
      SublevelPoint pt;
      pt.alpha = alpha;
      pt.scale = scale;
      pt.measure = sublevel_measure(p, q, alpha / scale);
      pt.ratio = pt.measure * std::pow(scale * r.height, inv_s) / std::pow(alpha, inv_s);
      ratios.push_back(pt.ratio);
      r.points.push_back(pt);
    }
  auto sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  r.median_ratio = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  r.max_ratio = sorted.back();
  r.spread = 1.0;
  for (double v : ratios) {
    if (v <= 0.0 || r.median_ratio <= 0.0) {
      r.spread = std::numeric_limits<double>::infinity();
      break;
    }
    r.spread = std::max({r.spread, v / r.median_ratio, r.median_ratio / v});
  }
  return r;
}

Polynomial random_polynomial(RandomStream& rng, int q, int s) {
  if (q < 1 || q > 2 || s < 1) throw std::invalid_argument("random polynomial needs q in {1,2}, s >= 1");
  Polynomial p;
  for (int total = 0; total <= s; ++total)
    for (int a = 0; a <= total; ++a) {
      const int b = total - a;
      if (q == 1 && b > 0) continue;
      std::vector<VarPower> f;
      if (a > 0) f.push_back({{1, 0}, a});
      if (b > 0) f.push_back({{1, 1}, b});
      // coefficients on a grid of 1/1000 so the polynomial is exact
      const long num = static_cast<long>(std::floor(rng.uniform(-1000.0, 1001.0)));
      const Rational c(std::clamp(num, -1000L, 1000L), 1000L);
      p.add_term(Monomial::from_factors(std::move(f)), c);
    }
  return p;
}

std::vector<std::vector<double>> sample_commutator_measure(const RunContext& ctx, const GroupLaw& law,
                                                           const Measure& mu, int n, int k, std::uint64_t count) {
  if (n < 2 || n > law.basis().step()) throw MathError("commutator depth must lie in [2, step]");
  if (k < 1) throw std::invalid_argument("block length must be positive");
  const ActionSpec blocks{n, k, 1, 0, n * k};
  const ActionSpec single{n, 1, 1, 0, n};
  const auto zero = ActionElement::identity(single);
  auto ones = zero;
  for (auto& b : ones.bits[0]) b = 1;
  std::vector<std::vector<double>> out(count);
  const int dim = law.dim();
  for (std::uint64_t i = 0; i < count; ++i) {
    RandomStream rng(ctx.seed, ctx.experiment, 0, sample_id(i));
    std::vector<FloatVector> xs;
    std::vector<double> buf(dim);
    for (int j = 0; j < n * k; ++j) {
      mu.sample(rng, buf);
      xs.emplace_back(buf);
    }
    out[i] = alternating_sum(law, single, zero, ones, block_sums(blocks, xs), n);
  }
  return out;
}

}  // namespace nilwalk
