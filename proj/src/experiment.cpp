#include "nilwalk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "nilwalk/errors.hpp"
#include "nilwalk/product_expansion.hpp"
#include "nilwalk/ustatistic.hpp"

namespace nilwalk {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"walk-functional", ExperimentKind::kWalkFunctional}, {"char-fn", ExperimentKind::kCharFn},
      {"lindeberg-gap", ExperimentKind::kLindebergGap},     {"llt-gap", ExperimentKind::kLltGap},
      {"moment-growth", ExperimentKind::kMomentGrowth},     {"truncation", ExperimentKind::kTruncation},
      {"sublevel", ExperimentKind::kSublevel},
  };
  return names;
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) config_error(where, "missing required field '" + key + "'");
  return j.at(key);
}

std::uint64_t positive_count(const json& j, const std::string& where, std::uint64_t minimum) {
  if (!j.is_number_integer() || j.get<long long>() < 0) config_error(where, "expected a nonnegative integer");
  const auto v = j.get<std::uint64_t>();
  if (v < minimum) config_error(where, "must be at least " + std::to_string(minimum));
  return v;
}

std::vector<double> float_list(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    try {
      out.push_back(to_double(json_rational(x)));
    } catch (const std::exception& e) {
      config_error(where, e.what());
    }
  }
  return out;
}

FloatVector float_vector(const json& j, int dim, const std::string& where) {
  auto v = float_list(j, where);
  if (static_cast<int>(v.size()) != dim) config_error(where, "expected " + std::to_string(dim) + " coordinates");
  return FloatVector(std::move(v));
}

NoiseBudget parse_budget(const json& j, const std::string& where) {
  NoiseBudget b;
  if (j.is_null()) return b;
  if (!j.is_object()) config_error(where, "expected an object");
  if (j.contains("initial_samples"))
    b.initial_samples = positive_count(j["initial_samples"], where + ".initial_samples", kMinSamples);
  if (j.contains("max_samples")) b.max_samples = positive_count(j["max_samples"], where + ".max_samples", kMinSamples);
  if (j.contains("noise_fraction")) {
    if (!j["noise_fraction"].is_number() || !(j["noise_fraction"].get<double>() > 0.0))
      config_error(where + ".noise_fraction", "must be a positive number");
    b.noise_fraction = j["noise_fraction"].get<double>();
  }
  if (b.max_samples < b.initial_samples) config_error(where, "max_samples is below initial_samples");
  return b;
}

MatchStrategy parse_strategy(const std::string& s, const std::string& where) {
  if (s == "auto") return MatchStrategy::kAuto;
  if (s == "skeleton") return MatchStrategy::kSkeleton;
  if (s == "moment") return MatchStrategy::kMoment;
  config_error(where, "unknown strategy '" + s + "'");
}

bool needs_schedule(ExperimentKind k) { return k != ExperimentKind::kSublevel; }

bool needs_measure(ExperimentKind k) { return k != ExperimentKind::kSublevel; }

bool uses_samples(ExperimentKind k) {
  return k == ExperimentKind::kWalkFunctional || k == ExperimentKind::kCharFn ||
         k == ExperimentKind::kMomentGrowth || k == ExperimentKind::kTruncation;
}

// Checks that do not need the group.
void check_entry(const json& e, ExperimentSpec& spec, const std::string& where) {
  const auto kind_name = require(e, "kind", where);
  if (!kind_name.is_string() || !kind_names().contains(kind_name.get<std::string>()))
    config_error(where + ".kind", "unknown experiment kind " + kind_name.dump());
  spec.kind = kind_names().at(kind_name.get<std::string>());
  const auto& id = require(e, "id", where);
  if (!id.is_string() || id.get<std::string>().empty()) config_error(where + ".id", "expected a nonempty string");
  spec.id = id.get<std::string>();
  if (spec.id.find_first_of(",\"\n") != std::string::npos)
    config_error(where + ".id", "must not contain commas, quotes or newlines");
  if (needs_measure(spec.kind)) require(e, "measure", where);
  if (needs_schedule(spec.kind)) {
    const auto& sched = require(e, "schedule", where);
    if (!sched.is_array() || sched.empty()) config_error(where + ".schedule", "expected a nonempty list");
    for (const auto& n : sched) {
      if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 1'000'000)
        config_error(where + ".schedule", "walk lengths must be integers in [1, 10^6]");
      const int v = n.get<int>();
      if (!spec.schedule.empty() && v <= spec.schedule.back())
        config_error(where + ".schedule", "must be strictly increasing");
      spec.schedule.push_back(v);
    }
  }
  if (uses_samples(spec.kind)) positive_count(require(e, "samples", where), where + ".samples", kMinSamples);
  if (spec.kind == ExperimentKind::kLindebergGap || spec.kind == ExperimentKind::kLltGap)
    parse_budget(e.value("budget", json()), where + ".budget");
  if (e.contains("match") && !e["match"].is_string()) config_error(where + ".match", "expected a string");
  if (e.contains("match")) parse_strategy(e["match"].get<std::string>(), where + ".match");
  switch (spec.kind) {
    case ExperimentKind::kWalkFunctional:
    case ExperimentKind::kLltGap:
      require(e, "test_function", where);
      break;
    case ExperimentKind::kCharFn:
      if (!require(e, "frequencies", where).is_array() || e["frequencies"].empty())
        config_error(where + ".frequencies", "expected a nonempty list of vectors");
      break;
    case ExperimentKind::kLindebergGap:
      require(e, "eta", where);
      break;
    case ExperimentKind::kMomentGrowth: {
      require(e, "statistic", where);
      const auto& m = require(e, "m", where);
      if (!m.is_number_integer() || m.get<int>() < 1 || m.get<int>() > 8)
        config_error(where + ".m", "expected an integer in [1, 8]");
      break;
    }
    case ExperimentKind::kTruncation: {
      const auto& d = require(e, "delta", where);
      if (!d.is_number() || !(d.get<double>() > 0.0)) config_error(where + ".delta", "must be positive");
      break;
    }
    case ExperimentKind::kSublevel: {
      require(e, "polynomials", where);
      for (const char* key : {"alphas", "scales"}) {
        auto v = float_list(require(e, key, where), where + "." + key);
        if (v.empty() || std::any_of(v.begin(), v.end(), [](double x) { return !(x > 0.0); }))
          config_error(where + "." + key, "expected a nonempty list of positive numbers");
      }
      break;
    }
  }
  if (e.contains("expect")) {
    const auto& x = e["expect"];
    if (!x.is_object()) config_error(where + ".expect", "expected an object");
    if (x.contains("slope")) {
      SlopeExpectation s;
      s.slope = float_list(json::array({x["slope"]}), where + ".expect.slope")[0];
      s.tolerance = float_list(json::array({x.value("tolerance", json(0))}), where + ".expect.tolerance")[0];
      s.ci_excludes_zero = x.value("ci_excludes_zero", false);
      spec.expect = s;
    }
  }
  spec.params = e;
}

std::string hex(const unsigned char* p, unsigned n) {
  std::string s;
  for (unsigned i = 0; i < n; ++i) s += fmt::format("{:02x}", p[i]);
  return s;
}

std::string timestamp() { return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr))); }

// JSON has no infinities; keep them as strings so a resumed CSV matches.
json lossless(double x) { return std::isfinite(x) ? json(x) : json(fmt::format("{}", x)); }

double from_lossless(const json& j) { return j.is_string() ? std::stod(j.get<std::string>()) : j.get<double>(); }

json row_json(const ResultRow& r) {
  return {r.experiment_id, r.group, r.n, r.quantity, lossless(r.mean), lossless(r.std_error), r.samples, r.seed};
}

ResultRow row_from_json(const json& j) {
  return {j.at(0).get<std::string>(), j.at(1).get<std::string>(), j.at(2).get<int>(), j.at(3).get<std::string>(),
          from_lossless(j.at(4)),     from_lossless(j.at(5)),      j.at(6).get<std::uint64_t>(),
          j.at(7).get<std::uint64_t>()};
}

json record_json(const PointRecord& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  return {{"n", r.n}, {"data", r.data}, {"rows", rows}};
}

PointRecord record_from_json(const json& j) {
  PointRecord r;
  r.n = j.at("n").get<int>();
  r.data = j.at("data");
  for (const auto& row : j.at("rows")) r.rows.push_back(row_from_json(row));
  return r;
}

json gap_point_json(const GapPoint& p) {
  return {{"N", p.n},
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
          {"mu_method", p.mu_method}};
}

GapPoint gap_point_from_json(const json& j) {
  GapPoint p;
  p.n = j.at("N");
  p.gap = j.at("gap");
  p.std_error = j.at("std_error");
  p.samples = j.at("samples");
  p.noise_ok = j.at("noise_ok");
  p.mu_value = j.at("mu_value");
  p.phi_value = j.at("phi_value");
  p.mu_std_error = j.at("mu_std_error");
  p.phi_std_error = j.at("phi_std_error");
  p.mu_samples = j.at("mu_samples");
  p.phi_samples = j.at("phi_samples");
  p.mu_method = j.at("mu_method");
  return p;
}

EstimateWithError estimate_from_json(const json& j) {
  return {j.at("mean"), j.at("std_error"), j.at("samples"), j.at("seed")};
}

// Everything one experiment needs, built once from its entry.
struct Prepared {
  const ResolvedGroup* group = nullptr;
  std::optional<Measure> mu, phi;
  std::optional<TestFunctionSpec> f;
  bool auto_smoothing = false;
  FloatVector g, h;
  bool scaled = true;
  std::uint64_t samples = 0;
  NoiseBudget budget;
  std::vector<std::vector<double>> frequencies;
  bool scaled_frequency = true;
  std::vector<double> eta;
  UDecomposition statistic;
  int m = 1;
  double tail_fraction = 0.25;
  double delta = 0.0;
  std::vector<std::pair<std::vector<Polynomial>, int>> polynomials;  // (map, q)
  std::vector<double> alphas, scales;
  double spread_within = 0.0;
};

UDecomposition parse_statistic(const json& j, const ResolvedGroup& grp, const std::string& where) {
  const auto& basis = grp.law->basis();
  UDecomposition d;
  try {
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms"))
        d.terms.push_back({ustatistic_from_json(t.at("blocks"), basis), json_rational(t.value("coef", json(1)))});
    } else if (j.contains("product_coordinate")) {
      const auto& l = j.at("product_coordinate");
      const int coord = basis.index_of({l.at(0).get<int>(), l.at(1).get<int>()});
      const int level = basis.level_of(coord);
      const int length = std::max(2, level) + 1;
      const auto prod = expand_product(*grp.law, length);
      const std::string part = j.value("part", "nonlinear");
      if (part != "nonlinear" && part != "full") config_error(where + ".part", "expected 'nonlinear' or 'full'");
      const auto& p = part == "full" ? prod.full.at(coord) : prod.nonlinear.at(coord);
      d = u_decompose(p, length, basis);
    } else {
      config_error(where, "expected 'terms' or 'product_coordinate'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    config_error(where, e.what());
  }
  if (d.terms.empty()) config_error(where, "the statistic is identically zero");
  return d;
}

std::vector<std::pair<std::vector<Polynomial>, int>> parse_polynomials(const json& j, std::uint64_t seed,
                                                                       std::uint32_t stream,
                                                                       const std::string& where) {
  std::vector<std::pair<std::vector<Polynomial>, int>> out;
  if (j.is_object() && j.contains("random")) {
    const auto& r = j["random"];
    const int count = r.value("count", 20), q = r.value("q", 2), s = r.value("s", 3);
    if (count < 1 || q < 1 || q > 2 || s < 1 || s > 6) config_error(where + ".random", "need count >= 1, q in {1,2}, s in [1,6]");
    const bool mixed = r.value("mixed", false);
    for (int i = 0; i < count; ++i) {
      RandomStream rng(seed, stream, 0, static_cast<std::uint32_t>(i));
      // with mixed set, q and s cycle through 1..q and 1..s
      const int qi = mixed ? 1 + i % q : q;
      const int si = mixed ? 1 + (i / q) % s : s;
      Polynomial p;
      while (p.degree() < 1) p = random_polynomial(rng, qi, si);
      out.push_back({{p}, qi});
    }
    return out;
  }
  if (!j.is_array()) config_error(where, "expected {\"random\": ...} or a list of polynomials");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    const int q = e.value("q", 1);
    if (q < 1 || q > 8) config_error(w + ".q", "expected 1 <= q <= 8");
    std::vector<Polynomial> map;
    for (const auto& comp : require(e, "components", w)) {
      Polynomial p;
      for (const auto& t : comp) {
        const auto exps = t.at("exponents").get<std::vector<int>>();
        if (static_cast<int>(exps.size()) != q) config_error(w, "exponent vectors must have length q");
        std::vector<VarPower> f;
        for (int c = 0; c < q; ++c)
          if (exps[c] > 0) f.push_back({{1, c}, exps[c]});
        p.add_term(Monomial::from_factors(std::move(f)), json_rational(t.at("coef")));
      }
      map.push_back(std::move(p));
    }
    if (map.empty()) config_error(w, "empty polynomial map");
    out.push_back({std::move(map), q});
  }
  return out;
}

Prepared prepare(const ResolvedGroup& grp, const ExperimentSpec& spec, std::uint64_t seed) {
  const auto& e = spec.params;
  const auto& basis = grp.law->basis();
  const int dim = grp.law->dim();
  const std::string where = "experiment '" + spec.id + "'";
  Prepared p;
  p.group = &grp;
  p.g = FloatVector::zero(dim);
  p.h = FloatVector::zero(dim);
  try {
    if (needs_measure(spec.kind)) p.mu = measure_from_json(e.at("measure"), basis);
    if (spec.kind == ExperimentKind::kLindebergGap || spec.kind == ExperimentKind::kLltGap) {
      if (e.contains("phi"))
        p.phi = measure_from_json(e["phi"], basis);
      else
        p.phi = matched_measure(*p.mu, *grp.algebra, parse_strategy(e.value("match", "auto"), where + ".match"));
      p.budget = parse_budget(e.value("budget", json()), where + ".budget");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    config_error(where, ex.what());
  }
  if (e.contains("test_function")) {
    json tf = e["test_function"];
    // "auto" couples the smoothing scale to the walk length
    if (tf.is_object() && tf.value("smoothing", json()) == "auto") {
      p.auto_smoothing = true;
      tf["smoothing"] = 1.0;
    }
    p.f = test_function_from_json(tf, dim);
  }
  if (e.contains("g")) p.g = float_vector(e["g"], dim, where + ".g");
  if (e.contains("h")) p.h = float_vector(e["h"], dim, where + ".h");
  p.scaled = e.value("scaled", true);
  if (e.contains("samples")) p.samples = e["samples"].get<std::uint64_t>();
  if (spec.kind == ExperimentKind::kCharFn) {
    for (const auto& v : e["frequencies"]) p.frequencies.push_back(float_vector(v, dim, where + ".frequencies").coords());
    p.scaled_frequency = e.value("scaled_frequency", true);
  }
  if (e.contains("eta")) p.eta = float_vector(e["eta"], dim, where + ".eta").coords();
  if (spec.kind == ExperimentKind::kMomentGrowth) {
    p.statistic = parse_statistic(e["statistic"], grp, where + ".statistic");
    p.m = e["m"].get<int>();
    p.tail_fraction = e.value("tail_fraction", 0.25);
    if (!(p.tail_fraction > 0.0 && p.tail_fraction <= 1.0)) config_error(where + ".tail_fraction", "must lie in (0, 1]");
  }
  if (spec.kind == ExperimentKind::kTruncation) p.delta = e["delta"].get<double>();
  if (spec.kind == ExperimentKind::kSublevel) {
    p.polynomials = parse_polynomials(e["polynomials"], seed, experiment_stream(spec.id), where + ".polynomials");
    p.alphas = float_list(e["alphas"], where + ".alphas");
    p.scales = float_list(e["scales"], where + ".scales");
    if (e.contains("expect")) p.spread_within = e["expect"].value("spread_within", 0.0);
  }
  return p;
}

std::string format_number(double v) { return fmt::format("{}", v); }

PointRecord compute_point(const Prepared& p, const ExperimentSpec& spec, const RunContext& ctx, int n) {
  const auto& law = *p.group->law;
  PointRecord rec;
  rec.n = n;
  std::optional<TestFunctionSpec> f = p.f;
  if (f && p.auto_smoothing) f->smoothing = default_smoothing(f->l1_norm(), law.basis().homogeneous_dim(), n);
  auto row = [&](std::string q, double mean, double se, std::uint64_t samples) {
    rec.rows.push_back({spec.id, p.group->name, n, std::move(q), mean, se, samples, ctx.seed});
  };
  switch (spec.kind) {
    case ExperimentKind::kWalkFunctional: {
      auto est = walk_functional(ctx, law, *p.mu, n, *f, p.g, p.h, p.scaled, p.samples);
      rec.data = est.to_json();
      rec.data["N"] = n;
      if (f) rec.data["smoothing"] = f->smoothing;
      row("functional", est.mean, est.std_error, est.samples);
      break;
    }
    case ExperimentKind::kCharFn: {
      rec.data = {{"N", n}, {"values", json::array()}};
      for (std::size_t k = 0; k < p.frequencies.size(); ++k) {
        const auto xi = p.scaled_frequency ? scaled_frequency(law.basis(), p.frequencies[k], n) : p.frequencies[k];
        auto est = char_fn_estimate(ctx, law, *p.mu, n, xi, p.samples);
        rec.data["values"].push_back({{"re", est.mean.real()},
                            {"im", est.mean.imag()},
                            {"std_error", est.std_error},
                            {"samples", est.samples},
                            {"exact", est.exact}});
        const double se = est.std_error / std::sqrt(2.0);
        row(fmt::format("char_fn_re[{}]", k), est.mean.real(), est.exact ? 0.0 : se, est.samples);
        row(fmt::format("char_fn_im[{}]", k), est.mean.imag(), est.exact ? 0.0 : se, est.samples);
      }
      break;
    }
    case ExperimentKind::kLindebergGap:
    case ExperimentKind::kLltGap: {
      auto pt = spec.kind == ExperimentKind::kLindebergGap
                    ? lindeberg_point(ctx, law, *p.mu, *p.phi, n, p.eta, p.budget)
                    : llt_point(ctx, law, *p.mu, *p.phi, n, *f, p.g, p.h, p.budget);
      rec.data = gap_point_json(pt);
      row("gap", pt.gap, pt.std_error, pt.samples);
      row("mu_value", pt.mu_value, pt.mu_std_error, pt.mu_samples);
      row("phi_value", pt.phi_value, pt.phi_std_error, pt.phi_samples);
      break;
    }
    case ExperimentKind::kMomentGrowth: {
      auto pt = moment_growth_point(ctx, law, *p.mu, p.statistic, p.m, n, p.samples, p.tail_fraction);
      rec.data = {{"N", n},
                  {"moment", pt.moment.to_json()},
                  {"tail_length", pt.tail_length},
                  {"tail_ratio", pt.tail_ratio.to_json()}};
      if (pt.closed_form) rec.data["closed_form"] = *pt.closed_form;
      row("moment", pt.moment.mean, pt.moment.std_error, pt.moment.samples);
      row("tail_ratio", pt.tail_ratio.mean, pt.tail_ratio.std_error, pt.tail_ratio.samples);
      if (pt.closed_form) row("closed_form", *pt.closed_form, 0.0, 0);
      break;
    }
    case ExperimentKind::kTruncation: {
      auto pt = truncation_point(ctx, law, *p.mu, n, p.delta, p.samples);
      rec.data = {{"N", n}, {"exceedances", pt.exceedances}, {"samples", pt.samples}};
      const double q = pt.probability();
      row("exceedance", q, pt.samples ? std::sqrt(q * (1.0 - q) / pt.samples) : 0.0, pt.samples);
      break;
    }
    case ExperimentKind::kSublevel: {
      const auto& [map, q] = p.polynomials.at(n);
      auto r = sublevel_check(map, q, p.alphas, p.scales);
      rec.data = r.to_json();
      json polys = json::array();
      for (const auto& comp : map) polys.push_back(to_string(comp, GradedBasis({q})));
      rec.data["polynomial"] = polys;
      for (const auto& s : r.points)
        row(fmt::format("ratio[alpha={};scale={}]", format_number(s.alpha), format_number(s.scale)), s.ratio, 0.0, 0);
      row("spread", r.spread, 0.0, 0);
      break;
    }
  }
  return rec;
}

bool slope_ok(const PowerLawFit& fit, const SlopeExpectation& x) {
  if (std::abs(fit.slope - x.slope) > x.tolerance) return false;
  if (x.ci_excludes_zero && !fit.excludes(0.0)) return false;
  return true;
}

void summarize(const Prepared& p, const ExperimentSpec& spec, ExperimentOutcome& out) {
  json pts = json::array();
  for (const auto& r : out.points) pts.push_back(r.data);
  json rep = {{"id", spec.id}, {"kind", to_string(spec.kind)}, {"points", pts}};
  switch (spec.kind) {
    case ExperimentKind::kLindebergGap:
    case ExperimentKind::kLltGap: {
      DecayReport d;
      d.quantity = spec.kind == ExperimentKind::kLindebergGap ? "lindeberg_gap" : "llt_gap";
      d.target_slope = spec.kind == ExperimentKind::kLindebergGap ? -1.0 : -0.5;
      d.budget = p.budget;
      for (const auto& r : out.points) d.points.push_back(gap_point_from_json(r.data));
      fit_decay(d);
      rep["decay"] = d.to_json();
      if (spec.expect) {
        bool ok = d.fit && slope_ok(*d.fit, *spec.expect);
        if (spec.kind == ExperimentKind::kLindebergGap && d.inconclusive) ok = false;
        out.verdict = ok;
      }
      break;
    }
    case ExperimentKind::kMomentGrowth: {
      std::vector<double> x, y, se;
      bool zero = true;
      for (const auto& r : out.points) {
        auto m = estimate_from_json(r.data.at("moment"));
        if (m.mean > 0.0) zero = false;
        x.push_back(r.n);
        y.push_back(m.mean);
        se.push_back(m.std_error);
      }
      const int degree = p.statistic.terms.front().first.homogeneous_degree(p.group->law->basis());
      rep["m"] = p.m;
      rep["degree"] = degree;
      rep["target_slope"] = p.m * degree;
      rep["zero"] = zero;
      std::optional<PowerLawFit> fit;
      if (!zero && x.size() >= 3 && std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; }))
        fit = fit_power_law(x, y, se);
      if (fit) rep["fit"] = fit->to_json();
      if (spec.expect) out.verdict = fit && slope_ok(*fit, *spec.expect);
      break;
    }
    case ExperimentKind::kTruncation: {
      bool nonincreasing = true;
      double prev = 2.0;
      for (const auto& r : out.points) {
        const double q = r.rows.front().mean;
        if (q > prev) nonincreasing = false;
        prev = q;
      }
      rep["nonincreasing"] = nonincreasing;
      break;
    }
    case ExperimentKind::kSublevel: {
      double worst = 1.0;
      for (const auto& r : out.points) {
        // an infinite spread is serialized as null
        const auto& v = r.data.at("spread");
        worst = std::max(worst, v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
      }
      rep["worst_spread"] = worst;
      if (p.spread_within > 0.0) {
        rep["spread_within"] = p.spread_within;
        out.verdict = worst <= p.spread_within;
      }
      break;
    }
    default:
      break;
  }
  if (out.verdict) rep["verdict"] = *out.verdict ? "pass" : "fail";
  out.report = std::move(rep);
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("cannot write " + tmp.string());
    f << text;
    if (!f) throw ResourceError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [name, kind] : kind_names())
    if (kind == k) return name;
  return "unknown";
}

ResolvedGroup resolve_group(const json& group) {
  ResolvedGroup r;
  if (group.is_string()) {
    const auto& entry = catalog_entry(group.get<std::string>());
    r.name = entry.name;
    r.algebra = std::make_unique<LieAlgebra>(entry.algebra);
    r.representation = entry.representation;
  } else if (group.is_object()) {
    auto doc = parse_algebra_document(group, group.value("name", std::string("custom")));
    auto report = validate_algebra(doc.basis, doc.constants);
    if (!report.ok()) throw MathError("algebra violates " + report.violations.front().axiom);
    r.name = doc.name;
    r.algebra = std::make_unique<LieAlgebra>(doc.name, doc.basis, doc.constants);
  } else {
    throw StructuralError("group must be a catalog name or an algebra document");
  }
  r.law = std::make_unique<GroupLaw>(*r.algebra);
  return r;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known{"name", "group", "seed", "output", "experiments", "description"};
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) config_error("config", "unknown field '" + k + "'");
  ExperimentConfig c;
  c.raw = j;
  c.group = require(j, "group", "config");
  if (!c.group.is_string() && !c.group.is_object()) config_error("config.group", "expected a name or an algebra document");
  const auto& seed = require(j, "seed", "config");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    config_error("config.seed", "expected an unsigned 64-bit integer");
  c.seed = seed.get<std::uint64_t>();
  c.output = j.value("output", std::string("nilwalk-run"));
  const auto& exps = require(j, "experiments", "config");
  if (!exps.is_array() || exps.empty()) config_error("config.experiments", "expected a nonempty list");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    ExperimentSpec spec;
    check_entry(exps[i], spec, "config.experiments[" + std::to_string(i) + "]");
    if (!ids.insert(spec.id).second) config_error("config.experiments[" + std::to_string(i) + "].id", "duplicate id");
    c.experiments.push_back(std::move(spec));
  }
  return c;
}

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw ResourceError("SHA-256 failed");
  return hex(md, len);
}

std::uint32_t experiment_stream(const std::string& id) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : id) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::string csv_header() { return "experiment_id,group,N,quantity,mean,std_error,samples,seed\n"; }

std::string csv_line(const ResultRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", r.experiment_id, r.group, r.n, r.quantity, format_number(r.mean),
                     format_number(r.std_error), r.samples, r.seed);
}

ExperimentOutcome run_experiment(const ResolvedGroup& group, const ExperimentSpec& spec, std::uint64_t seed,
                                 int threads, const RunHooks& hooks) {
  const Prepared p = prepare(group, spec, seed);
  const RunContext ctx{seed, experiment_stream(spec.id), std::max(1, threads)};
  ExperimentOutcome out;
  out.id = spec.id;
  out.kind = spec.kind;
  std::vector<int> units = spec.schedule;
  if (spec.kind == ExperimentKind::kSublevel)
    for (int i = 0; i < static_cast<int>(p.polynomials.size()); ++i) units.push_back(i);
  for (int n : units) {
    std::optional<PointRecord> rec;
    if (hooks.lookup) rec = hooks.lookup(spec, n);
    if (!rec) rec = compute_point(p, spec, ctx, n);
    if (hooks.on_point) hooks.on_point(spec, *rec);
    out.points.push_back(std::move(*rec));
  }
  summarize(p, spec, out);
  return out;
}

RunSummary run_config(const ExperimentConfig& config, std::uint64_t seed, int threads, const fs::path& out_dir,
                      bool quiet) {
  fs::create_directories(out_dir);
  const ResolvedGroup group = resolve_group(config.group);
  const std::string hash = config_hash(config.raw);
  RunSummary summary;
  summary.csv_path = out_dir / "results.csv";
  summary.report_path = out_dir / "report.json";
  summary.manifest_path = out_dir / "manifest.json";
  const fs::path checkpoint_path = out_dir / "checkpoint.json";

  // experiment id -> unit -> record
  std::map<std::string, std::map<int, json>> done;
  std::string started = timestamp();
  if (fs::exists(checkpoint_path)) {
    std::ifstream f(checkpoint_path);
    json ck = json::parse(f, nullptr, false);
    if (!ck.is_discarded() && ck.value("config_hash", "") == hash && ck.value("seed", std::uint64_t{0}) == seed) {
      for (const auto& [id, pts] : ck.at("points").items())
        for (const auto& r : pts) done[id][r.at("n").get<int>()] = r;
      started = ck.value("started", started);
    }
  }

  std::map<std::string, std::string> status;
  for (const auto& e : config.experiments) status[e.id] = "pending";

  auto flush = [&](const std::string& state) {
    json ck = {{"config_hash", hash}, {"seed", seed}, {"started", started}, {"points", json::object()}};
    std::string csv = csv_header();
    for (const auto& e : config.experiments) {
      json arr = json::array();
      for (const auto& [n, r] : done[e.id]) {
        arr.push_back(r);
        for (const auto& row : r.at("rows")) csv += csv_line(row_from_json(row));
      }
      ck["points"][e.id] = arr;
    }
    write_atomically(checkpoint_path, ck.dump());
    write_atomically(summary.csv_path, csv);
    json exps = json::array();
    for (const auto& e : config.experiments) {
      json units = json::array();
      for (const auto& [n, r] : done[e.id]) units.push_back(n);
      exps.push_back({{"id", e.id}, {"kind", to_string(e.kind)}, {"status", status[e.id]}, {"completed", units}});
    }
    json manifest = {{"tool_version", kToolVersion},
                     {"config_hash", hash},
                     {"seed", seed},
                     {"threads", threads},
                     {"started", started},
                     {"status", state},
                     {"experiments", exps}};
    if (state == "complete") manifest["finished"] = timestamp();
    write_atomically(summary.manifest_path, manifest.dump(2) + "\n");
  };

  RunHooks hooks;
  hooks.lookup = [&](const ExperimentSpec& spec, int n) -> std::optional<PointRecord> {
    auto it = done.find(spec.id);
    if (it == done.end() || !it->second.contains(n)) return std::nullopt;
    ++summary.resumed_points;
    return record_from_json(it->second.at(n));
  };
  hooks.on_point = [&](const ExperimentSpec& spec, const PointRecord& rec) {
    const bool fresh = !done[spec.id].contains(rec.n);
    done[spec.id][rec.n] = record_json(rec);
    if (fresh) flush("running");
    if (!quiet) fmt::print(stderr, "{} {} {}{}\n", spec.id, spec.kind == ExperimentKind::kSublevel ? "item" : "N", rec.n,
                           fresh ? "" : " (resumed)");
  };

  json report = {{"tool_version", kToolVersion},
                 {"config_hash", hash},
                 {"seed", seed},
                 {"group", group.name},
                 {"experiments", json::array()}};
  for (const auto& e : config.experiments) {
    status[e.id] = "running";
    auto outcome = run_experiment(group, e, seed, threads, hooks);
    status[e.id] = "complete";
    if (outcome.verdict && !*outcome.verdict) summary.all_verdicts_pass = false;
    report["experiments"].push_back(outcome.report);
    summary.outcomes.push_back(std::move(outcome));
  }
  write_atomically(summary.report_path, report.dump(2) + "\n");
  flush("complete");
  return summary;
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* v = std::getenv("NILWALK_SEED");
  if (!v || !*v) return fallback;
  std::uint64_t seed = 0;
  const std::string s(v);
  if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 20)
    throw ConfigError("NILWALK_SEED must be an unsigned integer");
  try {
    seed = std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("NILWALK_SEED is out of range");
  }
  return seed;
}

}  // namespace nilwalk
