#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nilwalk/catalog.hpp"
#include "nilwalk/errors.hpp"
#include "nilwalk/experiment.hpp"
#include "nilwalk/measure.hpp"
#include "nilwalk/product_expansion.hpp"
#include "nilwalk/rearrange.hpp"
#include "nilwalk/self_check.hpp"

using namespace nilwalk;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kResource = 3 };

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw StructuralError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

// A catalog name, or a path to an algebra document.
json group_argument(const std::string& arg) {
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) return arg;
  if (fs::exists(arg)) {
    json doc = read_json_file(arg);
    if (!doc.contains("name")) doc["name"] = fs::path(arg).stem().string();
    return doc;
  }
  throw StructuralError("unknown group '" + arg + "' (not in the catalog and not a file)");
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_list_groups() {
  json out = json::array();
  for (const auto& name : catalog_names()) {
    const auto& e = catalog_entry(name);
    const auto& b = e.algebra.basis();
    out.push_back({{"name", name},
                   {"dims", b.dims()},
                   {"step", b.step()},
                   {"homogeneous_dim", b.homogeneous_dim()},
                   {"matrix_oracle", e.representation.has_value()}});
  }
  print(out);
  return kOk;
}

int cmd_validate(const std::string& target, int samples, std::uint64_t seed) {
  const json g = group_argument(target);
  json report = {{"group", g.is_string() ? g.get<std::string>() : g.value("name", "custom")}};
  if (g.is_object()) {
    auto doc = parse_algebra_document(g, g.value("name", "custom"));
    auto v = validate_algebra(doc.basis, doc.constants);
    if (!v.ok()) {
      json violations = json::array();
      for (const auto& a : v.violations) {
        json w = json::array();
        for (const auto& l : a.witness) w.push_back(to_string(l));
        violations.push_back({{"axiom", a.axiom}, {"witness", w}, {"detail", a.detail}});
      }
      report["axioms"] = "fail";
      report["violations"] = violations;
      print(report);
      return kViolation;
    }
  }
  report["axioms"] = "pass";
  const auto grp = resolve_group(g);
  const auto checks = group_law_self_checks(*grp.law, grp.representation ? &*grp.representation : nullptr,
                                            samples, seed);
  json arr = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    arr.push_back(c.to_json());
    ok = ok && c.passed();
  }
  report["group_law"] = arr;
  report["oracle_samples"] = grp.representation ? samples : 0;
  report["status"] = ok ? "pass" : "fail";
  print(report);
  return ok ? kOk : kViolation;
}

int cmd_emit_law(const std::string& target) {
  const auto grp = resolve_group(group_argument(target));
  json j = grp.law->to_json();
  j["algebra"] = algebra_to_json(*grp.algebra);
  print(j);
  return kOk;
}

int cmd_verify_lemmas(const std::string& target, int max_n_len, int max_depth, std::size_t budget) {
  const auto grp = resolve_group(group_argument(target));
  const auto& law = *grp.law;
  json reports = json::array();
  std::optional<json> first_failure;
  auto keep = [&](const LemmaReport& r) {
    reports.push_back(r.to_json());
    if (!r.passed() && !first_failure) first_failure = reports.back();
  };
  std::vector<ProductPolynomials> products;
  ProductExpander expander(law, budget);
  for (int n = 2; n <= max_n_len; ++n) {
    expander.extend_to(n);
    products.push_back(expander.snapshot());
  }
  for (std::size_t a = 0; a < products.size(); ++a)
    for (std::size_t b = a + 1; b < products.size(); ++b) {
      keep(check_product_lemma(law.basis(), products[a], products[b]));
    }
  const int top = std::min(max_depth, law.basis().step());
  if (top < 2) {
    LemmaReport na;
    na.check = "nonvanishing";
    na.status = LemmaStatus::kNotApplicable;
    na.note = "step " + std::to_string(law.basis().step()) + " admits no alternation depth n >= 2";
    keep(na);
  }
  for (int n = 2; n <= top; ++n)
    for (int k = 1; k <= 2; ++k)
      for (int factors = 1; factors <= 2; ++factors) {
        ActionSpec spec{n, k, factors, 0, k * n * factors};
        auto r = verify_action_identities(law, spec, budget);
        for (const auto* rep : r.all()) keep(*rep);
      }
  json out = {{"group", grp.name},
              {"max_N", max_n_len},
              {"max_n", max_depth},
              {"reports", reports},
              {"status", first_failure ? "fail" : "pass"}};
  if (first_failure) out["first_counterexample"] = *first_failure;
  print(out);
  return first_failure ? kViolation : kOk;
}

int cmd_cramer(const std::string& measure_path, const std::string& target, double r_min, double r_max, int density) {
  const auto grp = resolve_group(group_argument(target));
  const auto mu = measure_from_json(read_json_file(measure_path), grp.law->basis());
  const auto r = cramer_check(mu, grp.law->basis(), r_min, r_max, density);
  print(r.to_json());
  return r.verdict == CramerReport::Verdict::kFails ? kViolation : kOk;
}

int cmd_run(const std::string& path, int threads, const std::string& output, bool quiet) {
  json raw;
  try {
    raw = read_json_file(path);
  } catch (const StructuralError& e) {
    throw ConfigError(e.what());
  }
  const auto config = parse_config(raw);
  const std::uint64_t seed = seed_from_environment(config.seed);
  fs::path out_dir = output.empty() ? fs::path(config.output) : fs::path(output);
  if (output.empty() && out_dir.is_relative()) out_dir = fs::path(path).parent_path() / out_dir;
  const auto summary = run_config(config, seed, threads, out_dir, quiet);
  json out = {{"results", summary.csv_path.string()},
              {"report", summary.report_path.string()},
              {"manifest", summary.manifest_path.string()},
              {"seed", seed},
              {"resumed_points", summary.resumed_points},
              {"expectations", summary.all_verdicts_pass ? "pass" : "fail"}};
  print(out);
  return summary.all_verdicts_pass ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on nilpotent Lie groups: exact group laws, lemma checks and Monte Carlo experiments."};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-groups", "List the built-in groups");

  std::string target;
  int samples = 1000;
  std::uint64_t seed = 1;
  auto* validate = app.add_subcommand("validate", "Check the Lie algebra axioms and the group law");
  validate->add_option("group", target, "Catalog name or algebra JSON file")->required();
  validate->add_option("--samples", samples, "Random elements per group-law check")->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed, "Seed for the random elements");

  auto* emit = app.add_subcommand("emit-law", "Print the group law polynomials as JSON");
  emit->add_option("group", target, "Catalog name or algebra JSON file")->required();

  int max_len = 6, max_depth = 3;
  std::size_t budget = kDefaultMonomialBudget;
  auto* verify = app.add_subcommand("verify-lemmas", "Exact checks of the product and rearrangement identities");
  verify->add_option("group", target, "Catalog name or algebra JSON file")->required();
  verify->add_option("--max-N", max_len, "Longest product expanded (pairs 2 <= N < M <= max-N)")
      ->check(CLI::Range(2, 12));
  verify->add_option("--max-n", max_depth, "Largest alternation depth, capped by the step")->check(CLI::Range(1, 8));
  verify->add_option("--budget", budget, "Monomial budget before giving up (exit 3)");

  std::string measure_path;
  double r_min = 1.0, r_max = 8.0;
  int density = 64;
  auto* cramer = app.add_subcommand("cramer", "Check the Cramer condition for a measure");
  cramer->add_option("measure", measure_path, "Measure JSON file")->required()->check(CLI::ExistingFile);
  cramer->add_option("--group", target, "Catalog name or algebra JSON file")->required();
  cramer->add_option("--r-min", r_min, "Inner radius of the frequency shell (> 0)");
  cramer->add_option("--r-max", r_max, "Outer radius of the frequency shell");
  cramer->add_option("--density", density, "Grid density per direction")->check(CLI::Range(4, 4096));

  std::string config_path, output;
  int threads = 1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the experiments of a config (NILWALK_SEED overrides the seed)");
  run->add_option("config", config_path, "Experiment config JSON")->required();
  run->add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  run->add_option("--output", output, "Output directory (default: the config's output, relative to the config)");
  run->add_flag("--quiet", quiet, "No progress lines on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmd_list_groups();
    if (*validate) return cmd_validate(target, samples, seed);
    if (*emit) return cmd_emit_law(target);
    if (*verify) return cmd_verify_lemmas(target, max_len, max_depth, budget);
    if (*cramer) return cmd_cramer(measure_path, target, r_min, r_max, density);
    if (*run) return cmd_run(config_path, threads, output, quiet);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kUsage;
  } catch (const StructuralError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const MathError& e) {
    fmt::print(stderr, "mathematical violation: {}\n", e.what());
    return kViolation;
  } catch (const ResourceError& e) {
    fmt::print(stderr, "resource exhausted: {}\n", e.what());
    return kResource;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}
