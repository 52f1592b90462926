#include "nilwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nilwalk/errors.hpp"

namespace nilwalk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Rational power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void check_weights(const std::vector<Rational>& weights) {
  Rational total = 0;
  for (const auto& w : weights) {
    if (sgn(w) <= 0) throw std::invalid_argument("measure weights must be positive");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("measure weights must sum to 1, got " + to_string(total));
}

std::vector<double> cumulative(const std::vector<Rational>& weights) {
  std::vector<double> c;
  Rational acc = 0;
  for (const auto& w : weights) {
    acc += w;
    c.push_back(to_double(acc));
  }
  if (!c.empty()) c.back() = 1.0;
  return c;
}

std::size_t pick(const std::vector<double>& cum, double u) {
  return std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(), cum.size() - 1);
}

}  // namespace

Latent Latent::uniform(Rational lo, Rational hi) {
  if (hi < lo) throw std::invalid_argument("uniform latent needs lo <= hi");
  Latent l;
  l.kind = Kind::kUniform;
  l.lo = std::move(lo);
  l.hi = std::move(hi);
  l.lo_d = to_double(l.lo);
  l.hi_d = to_double(l.hi);
  return l;
}

Latent Latent::gaussian(Rational variance) {
  if (sgn(variance) < 0) throw std::invalid_argument("gaussian latent needs nonnegative variance");
  Latent l;
  l.kind = Kind::kGaussian;
  l.variance = std::move(variance);
  l.sd_d = std::sqrt(to_double(l.variance));
  return l;
}

Latent Latent::two_point(Rational lo, Rational hi, Rational p_hi) {
  if (sgn(p_hi) < 0 || p_hi > 1) throw std::invalid_argument("two-point latent needs 0 <= p <= 1");
  Latent l;
  l.kind = Kind::kTwoPoint;
  l.lo = std::move(lo);
  l.hi = std::move(hi);
  l.p_hi = std::move(p_hi);
  l.lo_d = to_double(l.lo);
  l.hi_d = to_double(l.hi);
  l.p_d = to_double(l.p_hi);
  return l;
}

Rational Latent::moment(int k) const {
  switch (kind) {
    case Kind::kUniform:
      if (lo == hi) return power(lo, k);
      return (power(hi, k + 1) - power(lo, k + 1)) / ((k + 1) * (hi - lo));
    case Kind::kGaussian: {
      if (k % 2 == 1) return 0;
      Rational r = power(variance, k / 2);
      for (int j = k - 1; j > 1; j -= 2) r *= j;
      return r;
    }
    case Kind::kTwoPoint:
      return (1 - p_hi) * power(lo, k) + p_hi * power(hi, k);
  }
  return 0;
}

std::complex<double> Latent::char_fn(double beta) const {
  switch (kind) {
    case Kind::kUniform: {
      const double mid = to_double(Rational((lo + hi) / 2));
      const double width = to_double(Rational(hi - lo));
      return std::polar(sinc(std::numbers::pi * beta * width), -kTwoPi * beta * mid);
    }
    case Kind::kGaussian:
      return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * beta * beta * to_double(variance));
    case Kind::kTwoPoint: {
      const double p = to_double(p_hi);
      return (1.0 - p) * std::polar(1.0, -kTwoPi * beta * to_double(lo)) +
             p * std::polar(1.0, -kTwoPi * beta * to_double(hi));
    }
  }
  return 0.0;
}

double Latent::sample(RandomStream& rng) const {
  switch (kind) {
    case Kind::kUniform:
      return lo_d + (hi_d - lo_d) * rng.uniform();
    case Kind::kGaussian:
      return sd_d * rng.normal();
    case Kind::kTwoPoint:
      return rng.uniform() < p_d ? hi_d : lo_d;
  }
  return 0.0;
}

Measure Measure::discrete(std::vector<ExactVector> atoms, std::vector<Rational> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("discrete measure needs one weight per atom");
  check_weights(weights);
  Measure m;
  m.kind_ = Kind::kDiscrete;
  m.dim_ = atoms.front().size();
  for (const auto& a : atoms) {
    if (a.size() != m.dim_) throw StructuralError("atoms of different dimensions");
    for (int c = 0; c < a.size(); ++c) m.atoms_d_.push_back(to_double(a[c]));
  }
  m.atoms_ = std::move(atoms);
  m.weights_ = std::move(weights);
  m.cumulative_ = cumulative(m.weights_);
  return m;
}

Measure Measure::point_mass(ExactVector at) { return discrete({std::move(at)}, {Rational(1)}); }

Measure Measure::affine(std::vector<Latent> latents, ExactVector offset,
                        std::vector<std::vector<Rational>> coefficients) {
  if (static_cast<int>(coefficients.size()) != offset.size())
    throw StructuralError("affine measure needs one coefficient row per coordinate");
  for (const auto& row : coefficients)
    if (row.size() != latents.size()) throw StructuralError("coefficient row length must equal latent count");
  Measure m;
  m.kind_ = Kind::kAffine;
  m.dim_ = offset.size();
  for (int c = 0; c < offset.size(); ++c) m.offset_d_.push_back(to_double(offset[c]));
  for (const auto& row : coefficients) {
    std::vector<double> r;
    for (const auto& x : row) r.push_back(to_double(x));
    m.coefficients_d_.push_back(std::move(r));
  }
  m.latents_ = std::move(latents);
  m.offset_ = std::move(offset);
  m.coefficients_ = std::move(coefficients);
  return m;
}

Measure Measure::box(const std::vector<std::pair<Rational, Rational>>& intervals) {
  const int q = static_cast<int>(intervals.size());
  std::vector<Latent> latents;
  ExactVector offset = ExactVector::zero(q);
  std::vector<std::vector<Rational>> coef(q);
  std::vector<int> latent_of(q, -1);
  for (int c = 0; c < q; ++c) {
    const auto& [lo, hi] = intervals[c];
    if (hi < lo) throw std::invalid_argument("box interval with hi < lo");
    if (lo == hi) {
      offset[c] = lo;
    } else {
      latent_of[c] = static_cast<int>(latents.size());
      latents.push_back(Latent::uniform(lo, hi));
    }
  }
  for (int c = 0; c < q; ++c) {
    coef[c].assign(latents.size(), Rational(0));
    if (latent_of[c] >= 0) coef[c][latent_of[c]] = 1;
  }
  return affine(std::move(latents), std::move(offset), std::move(coef));
}

Measure Measure::mixture(std::vector<Measure> components, std::vector<Rational> weights) {
  if (components.empty() || components.size() != weights.size())
    throw std::invalid_argument("mixture needs one weight per component");
  check_weights(weights);
  Measure m;
  m.kind_ = Kind::kMixture;
  m.dim_ = components.front().dim();
  for (const auto& c : components)
    if (c.dim() != m.dim_) throw StructuralError("mixture components of different dimensions");
  m.components_ = std::move(components);
  m.weights_ = std::move(weights);
  m.cumulative_ = cumulative(m.weights_);
  return m;
}

bool Measure::is_compact_continuous() const {
  switch (kind_) {
    case Kind::kDiscrete: return false;
    case Kind::kAffine:
      for (const auto& l : latents_)
        if (l.kind == Latent::Kind::kGaussian) return false;
      return !latents_.empty();
    case Kind::kMixture:
      for (const auto& c : components_)
        if (!c.is_compact_continuous()) return false;
      return true;
  }
  return false;
}

bool Measure::has_gaussian() const {
  if (kind_ == Kind::kAffine)
    for (const auto& l : latents_)
      if (l.kind == Latent::Kind::kGaussian) return true;
  for (const auto& c : components_)
    if (c.has_gaussian()) return true;
  return false;
}

Rational Measure::moment(const Monomial& mono) const {
  switch (kind_) {
    case Kind::kDiscrete: {
      Rational total = 0;
      for (std::size_t a = 0; a < atoms_.size(); ++a) {
        Rational v = weights_[a];
        for (const auto& [var, e] : mono.factors()) v *= power(atoms_[a][var.coord], e);
        total += v;
      }
      return total;
    }
    case Kind::kAffine: {
      Polynomial p(1);
      for (const auto& [var, e] : mono.factors()) {
        Polynomial coord(offset_[var.coord]);
        for (std::size_t l = 0; l < latents_.size(); ++l)
          coord += Polynomial::monomial(Monomial::variable({1, static_cast<int>(l)}),
                                        coefficients_[var.coord][l]);
        p = p * pow(coord, e);
      }
      Rational total = 0;
      for (const auto& [m, c] : p.terms()) {
        Rational v = c;
        for (const auto& [var, e] : m.factors()) v *= latents_[var.coord].moment(e);
        total += v;
      }
      return total;
    }
    case Kind::kMixture: {
      Rational total = 0;
      for (std::size_t i = 0; i < components_.size(); ++i) total += weights_[i] * components_[i].moment(mono);
      return total;
    }
  }
  return 0;
}

std::complex<double> Measure::abelian_char_fn(const GradedBasis& basis, std::span<const double> xi) const {
  const int d1 = basis.dim(1);
  if (static_cast<int>(xi.size()) != d1) throw StructuralError("level-1 frequency has the wrong dimension");
  if (dim_ != basis.total_dim()) throw StructuralError("measure does not match the algebra");
  switch (kind_) {
    case Kind::kDiscrete: {
      std::complex<double> total = 0.0;
      for (std::size_t a = 0; a < atoms_.size(); ++a) {
        double t = 0.0;
        for (int c = 0; c < d1; ++c) t += xi[c] * atoms_d_[a * dim_ + c];
        total += to_double(weights_[a]) * std::polar(1.0, -kTwoPi * t);
      }
      return total;
    }
    case Kind::kAffine: {
      double t = 0.0;
      for (int c = 0; c < d1; ++c) t += xi[c] * offset_d_[c];
      std::complex<double> v = std::polar(1.0, -kTwoPi * t);
      for (std::size_t l = 0; l < latents_.size(); ++l) {
        double beta = 0.0;
        for (int c = 0; c < d1; ++c) beta += xi[c] * coefficients_d_[c][l];
        if (beta != 0.0) v *= latents_[l].char_fn(beta);
      }
      return v;
    }
    case Kind::kMixture: {
      std::complex<double> total = 0.0;
      for (std::size_t i = 0; i < components_.size(); ++i)
        total += to_double(weights_[i]) * components_[i].abelian_char_fn(basis, xi);
      return total;
    }
  }
  return 0.0;
}

void Measure::sample(RandomStream& rng, std::span<double> out) const {
  switch (kind_) {
    case Kind::kDiscrete: {
      const std::size_t a = atoms_.size() == 1 ? 0 : pick(cumulative_, rng.uniform());
      std::copy_n(atoms_d_.begin() + a * dim_, dim_, out.begin());
      return;
    }
    case Kind::kAffine: {
      double u[64];
      std::vector<double> heap;
      double* lat = u;
      if (latents_.size() > 64) {
        heap.resize(latents_.size());
        lat = heap.data();
      }
      for (std::size_t l = 0; l < latents_.size(); ++l) lat[l] = latents_[l].sample(rng);
      for (int c = 0; c < dim_; ++c) {
        double v = offset_d_[c];
        const auto& row = coefficients_d_[c];
        for (std::size_t l = 0; l < row.size(); ++l) v += row[l] * lat[l];
        out[c] = v;
      }
      return;
    }
    case Kind::kMixture:
      components_[pick(cumulative_, rng.uniform())].sample(rng, out);
      return;
  }
}

namespace {

nlohmann::json rational_json(const Rational& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return to_string(r);
}

nlohmann::json vector_json(const ExactVector& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int c = 0; c < v.size(); ++c) j.push_back(rational_json(v[c]));
  return j;
}

}  // namespace

Rational json_rational(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return parse_rational(j.dump());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ConfigError("expected a number or rational string, got " + j.dump());
}

ExactVector json_vector(const nlohmann::json& j, int q) {
  if (!j.is_array() || static_cast<int>(j.size()) != q)
    throw ConfigError("expected a vector of length " + std::to_string(q) + ", got " + j.dump());
  std::vector<Rational> v;
  for (const auto& x : j) v.push_back(json_rational(x));
  return ExactVector(std::move(v));
}


nlohmann::json Measure::to_json() const {
  switch (kind_) {
    case Kind::kDiscrete: {
      nlohmann::json atoms = nlohmann::json::array(), w = nlohmann::json::array();
      for (std::size_t a = 0; a < atoms_.size(); ++a) {
        atoms.push_back(vector_json(atoms_[a]));
        w.push_back(rational_json(weights_[a]));
      }
      return {{"variant", "discrete"}, {"atoms", atoms}, {"weights", w}};
    }
    case Kind::kAffine: {
      nlohmann::json lat = nlohmann::json::array(), coef = nlohmann::json::array();
      for (const auto& l : latents_) {
        switch (l.kind) {
          case Latent::Kind::kUniform:
            lat.push_back({{"kind", "uniform"}, {"lo", rational_json(l.lo)}, {"hi", rational_json(l.hi)}});
            break;
          case Latent::Kind::kGaussian:
            lat.push_back({{"kind", "gaussian"}, {"variance", rational_json(l.variance)}});
            break;
          case Latent::Kind::kTwoPoint:
            lat.push_back({{"kind", "two_point"}, {"lo", rational_json(l.lo)}, {"hi", rational_json(l.hi)},
                           {"p_hi", rational_json(l.p_hi)}});
            break;
        }
      }
      for (const auto& row : coefficients_) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : row) r.push_back(rational_json(x));
        coef.push_back(r);
      }
      return {{"variant", "latent"}, {"latents", lat}, {"offset", vector_json(offset_)}, {"coefficients", coef}};
    }
    case Kind::kMixture: {
      nlohmann::json comps = nlohmann::json::array(), w = nlohmann::json::array();
      for (std::size_t i = 0; i < components_.size(); ++i) {
        comps.push_back(components_[i].to_json());
        w.push_back(rational_json(weights_[i]));
      }
      return {{"variant", "mixture"}, {"components", comps}, {"weights", w}};
    }
  }
  return {};
}

Measure measure_from_json(const nlohmann::json& j, const GradedBasis& basis) {
  const int q = basis.total_dim();
  if (!j.is_object() || !j.contains("variant")) throw ConfigError("measure needs a variant");
  const std::string variant = j.at("variant").get<std::string>();
  try {
    if (variant == "discrete") {
      std::vector<ExactVector> atoms;
      std::vector<Rational> weights;
      for (const auto& a : j.at("atoms")) atoms.push_back(json_vector(a, q));
      if (j.contains("weights"))
        for (const auto& w : j.at("weights")) weights.push_back(json_rational(w));
      else
        weights.assign(atoms.size(), Rational(1, static_cast<long>(atoms.size())));
      return Measure::discrete(std::move(atoms), std::move(weights));
    }
    if (variant == "box" && j.contains("intervals")) {
      std::vector<std::pair<Rational, Rational>> iv;
      const auto& list = j.at("intervals");
      if (static_cast<int>(list.size()) != q) throw ConfigError("box needs one interval per coordinate");
      for (const auto& p : list) iv.push_back({json_rational(p.at(0)), json_rational(p.at(1))});
      return Measure::box(iv);
    }
    if (variant == "gaussian" && j.contains("variances")) {
      const auto& list = j.at("variances");
      if (static_cast<int>(list.size()) != q) throw ConfigError("gaussian needs one variance per coordinate");
      std::vector<Latent> lat;
      std::vector<std::vector<Rational>> coef(q, std::vector<Rational>(q));
      for (int c = 0; c < q; ++c) {
        lat.push_back(Latent::gaussian(json_rational(list[c])));
        coef[c][c] = 1;
      }
      ExactVector offset = j.contains("mean") ? json_vector(j.at("mean"), q) : ExactVector::zero(q);
      return Measure::affine(std::move(lat), std::move(offset), std::move(coef));
    }
    if (variant == "box" || variant == "gaussian" || variant == "latent") {
      std::vector<Latent> lat;
      for (const auto& l : j.at("latents")) {
        std::string kind = l.is_array() ? (variant == "gaussian" ? "gaussian" : "uniform")
                                        : l.value("kind", variant == "gaussian" ? "gaussian" : "uniform");
        if (l.is_array()) {
          if (kind == "gaussian") lat.push_back(Latent::gaussian(json_rational(l.at(0))));
          else lat.push_back(Latent::uniform(json_rational(l.at(0)), json_rational(l.at(1))));
        } else if (kind == "uniform") {
          lat.push_back(Latent::uniform(json_rational(l.at("lo")), json_rational(l.at("hi"))));
        } else if (kind == "gaussian") {
          lat.push_back(Latent::gaussian(json_rational(l.at("variance"))));
        } else if (kind == "two_point") {
          lat.push_back(Latent::two_point(json_rational(l.at("lo")), json_rational(l.at("hi")),
                                          json_rational(l.at("p_hi"))));
        } else {
          throw ConfigError("unknown latent kind " + kind);
        }
      }
      ExactVector offset = j.contains("offset") ? json_vector(j.at("offset"), q) : ExactVector::zero(q);
      std::vector<std::vector<Rational>> coef;
      for (const auto& row : j.at("coefficients")) {
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(json_rational(x));
        coef.push_back(std::move(r));
      }
      return Measure::affine(std::move(lat), std::move(offset), std::move(coef));
    }
    if (variant == "mixture") {
      std::vector<Measure> comps;
      std::vector<Rational> weights;
      for (const auto& c : j.at("components")) comps.push_back(measure_from_json(c, basis));
      for (const auto& w : j.at("weights")) weights.push_back(json_rational(w));
      return Measure::mixture(std::move(comps), std::move(weights));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid ") + variant + " measure: " + e.what());
  }
  throw ConfigError("unknown measure variant " + variant);
}

std::vector<Monomial> monomials_up_to(const GradedBasis& basis, int d) {
  std::vector<Monomial> out;
  std::vector<VarPower> current;
  const int q = basis.total_dim();
  std::function<void(int, int)> rec = [&](int c, int budget) {
    if (c == q) {
      out.push_back(Monomial::from_factors(current));
      return;
    }
    const int level = basis.level_of(c);
    for (int e = 0; e * level <= budget; ++e) {
      if (e > 0) current.push_back({{1, c}, e});
      rec(c + 1, budget - e * level);
      if (e > 0) current.pop_back();
    }
  };
  rec(0, d);
  std::sort(out.begin(), out.end());
  return out;
}

MomentTable moments(const Measure& mu, const GradedBasis& basis, int d) {
  if (d < 0) throw std::invalid_argument("moment degree must be nonnegative");
  if (mu.dim() != basis.total_dim()) throw StructuralError("measure does not match the algebra");
  MomentTable t;
  for (const auto& m : monomials_up_to(basis, d)) t.emplace(m, mu.moment(m));
  return t;
}

double moment_mismatch(const Measure& a, const Measure& b, const GradedBasis& basis, int d) {
  double worst = 0.0;
  for (const auto& m : monomials_up_to(basis, d))
    worst = std::max(worst, std::abs(to_double(Rational(a.moment(m) - b.moment(m)))));
  return worst;
}

SubLaplacianCoefficients sublaplacian_coeffs(const Measure& mu, const LieAlgebra& algebra) {
  const auto& basis = algebra.basis();
  if (mu.dim() != basis.total_dim()) throw StructuralError("measure does not match the algebra");
  const int d1 = basis.dim(1);
  auto x = [](int c, int e = 1) { return Monomial::variable({1, c}, e); };
  for (int c = 0; c < d1; ++c)
    if (sgn(mu.moment(x(c))) != 0)
      throw MathError("measure is not centered: level-1 mean " + to_string(mu.moment(x(c))) + " at " +
                      to_string(basis.label(c)));
  SubLaplacianCoefficients s;
  s.a.assign(d1, std::vector<Rational>(d1));
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) s.a[i][j] = mu.moment(x(i) * x(j)) / 2;
  if (basis.step() >= 2) {
    auto [lo, hi] = basis.level_range(2);
    for (int c = lo; c < hi; ++c) {
      Rational b = mu.moment(x(c));
      Rational drift = b;
      for (int j = 0; j < d1; ++j)
        for (int k = j + 1; k < d1; ++k) drift -= s.a[j][k] * algebra.constants().at(j, k, c) / 2;
      s.b.push_back(b);
      s.drift.push_back(drift);
    }
  }
  return s;
}

}  // namespace nilwalk
