#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/algebra.hpp"
#include "nilwalk/polynomial.hpp"
#include "nilwalk/rng.hpp"

namespace nilwalk {

// One scalar latent variable of an affine-latent measure.
struct Latent {
  enum class Kind { kUniform, kGaussian, kTwoPoint };
  Kind kind = Kind::kUniform;
  Rational lo, hi;     // uniform: support [lo, hi]; two-point: the atoms
  Rational variance;   // gaussian (mean zero)
  Rational p_hi;       // two-point: probability of hi
  // float copies for sampling, set by the factories
  double lo_d = 0.0, hi_d = 0.0, sd_d = 0.0, p_d = 0.0;

  static Latent uniform(Rational lo, Rational hi);
  static Latent gaussian(Rational variance);
  static Latent two_point(Rational lo, Rational hi, Rational p_hi);

  Rational moment(int k) const;
  // E[exp(-2 pi i beta u)]
  std::complex<double> char_fn(double beta) const;
  double sample(RandomStream& rng) const;
};

// Probability measure on the Lie algebra in exponential coordinates:
// finitely many atoms, an affine image x = offset + A u of independent
// latents u, or a finite mixture of measures.
class Measure {
 public:
  enum class Kind { kDiscrete, kAffine, kMixture };

  // Weights must be positive and sum to 1. Throws std::invalid_argument.
  static Measure discrete(std::vector<ExactVector> atoms, std::vector<Rational> weights);
  static Measure affine(std::vector<Latent> latents, ExactVector offset,
                        std::vector<std::vector<Rational>> coefficients);
  // Independent uniform coordinates on [lo_c, hi_c]; equal ends give a constant.
  static Measure box(const std::vector<std::pair<Rational, Rational>>& intervals);
  static Measure mixture(std::vector<Measure> components, std::vector<Rational> weights);
  static Measure point_mass(ExactVector at);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  const std::vector<ExactVector>& atoms() const { return atoms_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const std::vector<Latent>& latents() const { return latents_; }
  const ExactVector& offset() const { return offset_; }
  const std::vector<std::vector<Rational>>& coefficients() const { return coefficients_; }
  const std::vector<Measure>& components() const { return components_; }

  // No atoms and no Gaussian latents anywhere.
  bool is_compact_continuous() const;
  bool has_gaussian() const;

  // E[prod_c x_c^{e_c}] for a monomial in single-element variables (the
  // sequence index is ignored). Exact.
  Rational moment(const Monomial& m) const;

  // Characteristic function of the level-1 projection, with e_{-xi}.
  std::complex<double> abelian_char_fn(const GradedBasis& basis, std::span<const double> xi) const;

  // Writes one draw into out (size dim()).
  void sample(RandomStream& rng, std::span<double> out) const;

  nlohmann::json to_json() const;

 private:
  Kind kind_ = Kind::kDiscrete;
  int dim_ = 0;
  std::vector<ExactVector> atoms_;
  std::vector<Rational> weights_;
  std::vector<double> cumulative_;
  std::vector<Latent> latents_;
  ExactVector offset_;
  std::vector<std::vector<Rational>> coefficients_;  // dim x latents
  std::vector<std::vector<double>> coefficients_d_;
  std::vector<double> offset_d_;
  std::vector<double> atoms_d_;
  std::vector<Measure> components_;
};

// Throws ConfigError on malformed documents.
Measure measure_from_json(const nlohmann::json& j, const GradedBasis& basis);

// Integer, decimal or "p/q" string. Throws ConfigError.
Rational json_rational(const nlohmann::json& j);
ExactVector json_vector(const nlohmann::json& j, int q);

// Moments of all monomials of homogeneous degree <= d in single-element variables.
using MomentTable = std::map<Monomial, Rational>;
MomentTable moments(const Measure& mu, const GradedBasis& basis, int d);
std::vector<Monomial> monomials_up_to(const GradedBasis& basis, int d);

struct SubLaplacianCoefficients {
  std::vector<std::vector<Rational>> a;  // d1 x d1
  std::vector<Rational> b;               // d2
  std::vector<Rational> drift;           // d2
};

// Throws MathError unless the level-1 mean vanishes.
SubLaplacianCoefficients sublaplacian_coeffs(const Measure& mu, const LieAlgebra& algebra);

struct CramerShell {
  double r_lo;
  double r_hi;
  double sup;
};

struct CramerReport {
  enum class Verdict { kSatisfies, kFails, kInconclusive };
  Verdict verdict = Verdict::kInconclusive;
  double r_min = 0.0;
  double r_max = 0.0;
  int directions = 0;
  std::vector<CramerShell> shells;
  double sup = 0.0;     // over r_min < |xi| <= r_max
  double margin = 0.0;  // 1 - sup
  std::vector<double> argmax;
  std::optional<std::vector<double>> witness;  // exact modulus-1 frequency
  nlohmann::json to_json() const;
};

std::string to_string(CramerReport::Verdict v);

// Grid search over shells of the level-1 characteristic function with local
// refinement, plus an exact lattice detector for atoms.
CramerReport cramer_check(const Measure& mu, const GradedBasis& basis, double r_min, double r_max,
                          int density = 64);

enum class MatchStrategy { kAuto, kSkeleton, kMoment };

// Continuous compactly supported measure with the same moments of homogeneous
// degree <= 3 (to 1e-10). Throws MathError when the input is not centered or
// the construction misses the tolerance.
Measure matched_measure(const Measure& mu, const LieAlgebra& algebra,
                        MatchStrategy strategy = MatchStrategy::kAuto);

// Largest absolute difference over all monomials of homogeneous degree <= d.
double moment_mismatch(const Measure& a, const Measure& b, const GradedBasis& basis, int d);

}  // namespace nilwalk
