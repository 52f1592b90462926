#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/estimate.hpp"
#include "nilwalk/group_law.hpp"
#include "nilwalk/measure.hpp"
#include "nilwalk/regression.hpp"
#include "nilwalk/test_function.hpp"
#include "nilwalk/ustatistic.hpp"

namespace nilwalk {

// Seed and stream ids for one experiment. Every sample uses the stream
// (seed, experiment, leg, sample index).
struct RunContext {
  std::uint64_t seed = 0;
  std::uint32_t experiment = 0;
  int threads = 1;
};

// Truncation window in frequency space: max_n |xi^{(n)}| N^{n/2 - eps_n} <= 1.
struct FrequencyWindow {
  std::vector<double> epsilons;  // eps_1 > eps_2 > ... > eps_s > 0

  // eps_n = 4^{s-n} / 100.
  static FrequencyWindow standard(int step);
  // eps_n > n eps_{n+1} and positivity.
  bool chain_holds() const;
  bool contains(const GradedBasis& basis, std::span<const double> xi, int n) const;
};

// xi_N^{(n)} = eta^{(n)} N^{-n/2}.
std::vector<double> scaled_frequency(const GradedBasis& basis, std::span<const double> eta, int n);

// Draws x_1..x_N into a row-major buffer of N * dim doubles.
void sample_string(const Measure& mu, RandomStream& rng, int n, std::vector<double>& out);

// Pi(x_1..x_N), left to right, written to out (size dim).
void walk_product(const GroupLaw& law, const std::vector<double>& xs, int n, std::vector<double>& scratch,
                  std::span<double> out);

struct WalkOptions {
  bool scaled = true;
  std::uint32_t leg = 0;
};

// E f(log g * Pi * log h), with Pi dilated by N^{-1/2} when scaled. Samples
// [first, first + count) of the stream are used.
Accumulator walk_functional_range(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                  const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                                  const WalkOptions& opt, std::uint64_t first, std::uint64_t count);

EstimateWithError walk_functional(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                  const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                                  bool scaled, std::uint64_t samples);

// E[e_xi(Pi)] with e_xi(x) = exp(2 pi i xi.x).
ComplexAccumulator char_fn_range(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                 std::span<const double> xi, std::uint32_t leg, std::uint64_t first,
                                 std::uint64_t count);

inline constexpr double kEnumerationLimit = 1e6;

// Exact value for atomic measures: enumeration of all strings when
// |atoms|^N <= 1e6, or for step <= 2 a dynamic program over partial level-1
// sums. Empty when neither applies.
std::optional<std::complex<double>> exact_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                  std::span<const double> xi);
std::optional<std::complex<double>> enumerate_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                      std::span<const double> xi);
std::optional<std::complex<double>> step_two_char_fn(const GroupLaw& law, const Measure& mu, int n,
                                                     std::span<const double> xi);

// Enumeration when |atoms|^N <= 1e6 (unless monte_carlo is forced), sampling otherwise.
ComplexEstimate char_fn_estimate(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n,
                                 std::span<const double> xi, std::uint64_t samples, bool monte_carlo = false);

// Sample budget for the gap experiments: grow until the noise is below
// noise_fraction * gap, stopping at max_samples per leg and point.
struct NoiseBudget {
  std::uint64_t initial_samples = 100'000;
  std::uint64_t max_samples = 25'000'000;
  double noise_fraction = 0.2;
  nlohmann::json to_json() const;
};

struct GapPoint {
  int n = 0;
  double gap = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;  // both legs
  bool noise_ok = true;
  double mu_value = 0.0;      // real part or functional value
  double phi_value = 0.0;
  double mu_std_error = 0.0;  // zero for an exact leg
  double phi_std_error = 0.0;
  std::uint64_t mu_samples = 0;
  std::uint64_t phi_samples = 0;
  std::string mu_method;      // exact or monte-carlo
};

struct DecayReport {
  std::string quantity;
  std::vector<GapPoint> points;
  std::optional<PowerLawFit> fit;
  double target_slope = 0.0;
  bool inconclusive = false;  // some point missed the noise budget
  bool degenerate = false;    // zero gaps, nothing to fit
  NoiseBudget budget;
  nlohmann::json to_json() const;
};

// Fits the gap points; sets degenerate when a gap is zero.
void fit_decay(DecayReport& report);

// |chi_{N,mu}(xi_N) - chi_{N,phi}(xi_N)| for xi_N scaled from eta.
GapPoint lindeberg_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi, int n,
                         std::span<const double> eta, const NoiseBudget& budget);
DecayReport lindeberg_gap(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi,
                          const std::vector<int>& schedule, std::span<const double> eta, const NoiseBudget& budget);

// Scaled functional gap between mu^{*N} and phi^{*N}.
GapPoint llt_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi, int n,
                   const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h, const NoiseBudget& budget);
DecayReport llt_gap(const RunContext& ctx, const GroupLaw& law, const Measure& mu, const Measure& phi,
                    const TestFunctionSpec& f, const FloatVector& g, const FloatVector& h,
                    const std::vector<int>& schedule, const NoiseBudget& budget);

struct GrowthPoint {
  int n = 0;
  EstimateWithError moment;               // E|U|^{2m}
  std::optional<double> closed_form;      // when known exactly
  int tail_length = 0;                    // N'
  EstimateWithError tail_ratio;           // E|Pi^{(d)} - Pi^{(d)}(tail)|^{2m} / (N^{md} (N'/N)^m)
};

struct MomentGrowthReport {
  int m = 1;
  int degree = 1;  // homogeneous degree of the statistic
  std::vector<GrowthPoint> points;
  std::optional<PowerLawFit> fit;
  double target_slope = 0.0;
  bool zero = false;  // the statistic vanished on every sample
  nlohmann::json to_json() const;
};

// U is a rational combination of generalized U-statistics of one homogeneous
// degree. tail_fraction sets N' = max(1, round(fraction N)).
GrowthPoint moment_growth_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                const UDecomposition& stat, int m, int n, std::uint64_t samples,
                                double tail_fraction = 0.25);
MomentGrowthReport moment_growth(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                 const UDecomposition& stat, int m, const std::vector<int>& schedule,
                                 std::uint64_t samples, double tail_fraction = 0.25);

// Closed form N E[(sum_c w_c x_c)^2] for a level-1 linear statistic and m = 1.
std::optional<double> level_one_closed_form(const UDecomposition& stat, const Measure& mu,
                                            const GradedBasis& basis, int m, int n);

struct TailPoint {
  int n = 0;
  std::uint64_t exceedances = 0;
  std::uint64_t samples = 0;
  double probability() const { return samples ? static_cast<double>(exceedances) / samples : 0.0; }
};

struct TailReport {
  double delta = 0.0;
  std::vector<TailPoint> points;
  bool nonincreasing = true;
  nlohmann::json to_json() const;
};

// Exceedance of max_n N^{-n/2} |Pi^{(n)}| > N^delta.
TailPoint truncation_point(const RunContext& ctx, const GroupLaw& law, const Measure& mu, int n, double delta,
                           std::uint64_t samples);
TailReport truncation_tail_check(const RunContext& ctx, const GroupLaw& law, const Measure& mu,
                                 const std::vector<int>& schedule, double delta, std::uint64_t samples);

// Measure of {x in [-1/2, 1/2]^q : |p(x)| <= alpha} for a polynomial map in
// slot-1 variables x^{(c)}, coordinate c < q.
double sublevel_measure(const std::vector<Polynomial>& p, int q, double alpha);

struct SublevelPoint {
  double alpha = 0.0;
  double scale = 1.0;
  double measure = 0.0;
  double ratio = 0.0;  // measure * ht^{1/s} / alpha^{1/s}, ht of the scaled map
};

struct SublevelReport {
  int q = 1;
  int degree = 1;
  double height = 0.0;
  std::vector<SublevelPoint> points;
  double median_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;  // max over points of max(r / median, median / r)
  bool within(double factor) const { return spread <= factor; }
  nlohmann::json to_json() const;
};

SublevelReport sublevel_check(const std::vector<Polynomial>& p, int q, const std::vector<double>& alphas,
                              const std::vector<double>& scales);

// Random polynomial of degree <= s in q variables, coefficients uniform in [-1, 1].
Polynomial random_polynomial(RandomStream& rng, int q, int s);

// Level-n alternating commutator sums of n block sums of k increments.
std::vector<std::vector<double>> sample_commutator_measure(const RunContext& ctx, const GroupLaw& law,
                                                           const Measure& mu, int n, int k,
                                                           std::uint64_t count);

}  // namespace nilwalk
