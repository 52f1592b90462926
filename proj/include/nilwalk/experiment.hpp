#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nilwalk/catalog.hpp"
#include "nilwalk/group_law.hpp"
#include "nilwalk/montecarlo.hpp"

namespace nilwalk {

inline constexpr const char* kToolVersion = "0.4.0";
inline constexpr std::uint64_t kMinSamples = 1000;

// A group from the catalog or an inline algebra document, with its law.
struct ResolvedGroup {
  std::string name;
  std::unique_ptr<LieAlgebra> algebra;
  std::unique_ptr<GroupLaw> law;
  std::optional<MatrixRepresentation> representation;
};

// Catalog name or JSON document (object, or path to a file). Throws
// StructuralError, and MathError when the document violates an axiom.
ResolvedGroup resolve_group(const nlohmann::json& group);

enum class ExperimentKind {
  kWalkFunctional,
  kCharFn,
  kLindebergGap,
  kLltGap,
  kMomentGrowth,
  kTruncation,
  kSublevel,
};

std::string to_string(ExperimentKind k);

// Optional pass/fail expectation on a fitted slope.
struct SlopeExpectation {
  double slope = 0.0;
  double tolerance = 0.0;
  bool ci_excludes_zero = false;
};

struct ExperimentSpec {
  std::string id;
  ExperimentKind kind = ExperimentKind::kWalkFunctional;
  nlohmann::json params;  // the raw entry, validated
  std::vector<int> schedule;
  std::optional<SlopeExpectation> expect;
};

struct ExperimentConfig {
  nlohmann::json group;
  std::uint64_t seed = 0;
  std::string output;
  std::vector<ExperimentSpec> experiments;
  nlohmann::json raw;
};

// Throws ConfigError with a path-qualified message.
ExperimentConfig parse_config(const nlohmann::json& j);

// Hex SHA-256 of the canonical serialization (sorted keys, no whitespace).
std::string config_hash(const nlohmann::json& j);

// 32-bit FNV-1a of the experiment id, used as its stream id.
std::uint32_t experiment_stream(const std::string& id);

struct ResultRow {
  std::string experiment_id;
  std::string group;
  int n = 0;
  std::string quantity;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string csv_line(const ResultRow& r);

// One finished unit of an experiment: a walk length, or a polynomial index
// for sublevel experiments.
struct PointRecord {
  int n = 0;
  nlohmann::json data;
  std::vector<ResultRow> rows;
};

struct ExperimentOutcome {
  std::string id;
  ExperimentKind kind = ExperimentKind::kWalkFunctional;
  std::vector<PointRecord> points;
  nlohmann::json report;
  std::optional<bool> verdict;  // set when an expectation exists
};

struct RunHooks {
  // Called after each finished point; completed points may be supplied to skip work.
  std::function<void(const ExperimentSpec&, const PointRecord&)> on_point;
  std::function<std::optional<PointRecord>(const ExperimentSpec&, int)> lookup;
};

// Runs one experiment. Results do not depend on ctx.threads.
ExperimentOutcome run_experiment(const ResolvedGroup& group, const ExperimentSpec& spec, std::uint64_t seed,
                                 int threads, const RunHooks& hooks = {});

struct RunSummary {
  std::vector<ExperimentOutcome> outcomes;
  std::filesystem::path csv_path, report_path, manifest_path;
  bool all_verdicts_pass = true;
  int resumed_points = 0;
};

// Runs every experiment, writing results.csv, report.json, manifest.json and
// a checkpoint into out_dir after each point. A rerun with an unchanged
// config hash and seed resumes from the checkpoint.
RunSummary run_config(const ExperimentConfig& config, std::uint64_t seed, int threads,
                      const std::filesystem::path& out_dir, bool quiet = false);

// Seed from NILWALK_SEED when set, otherwise the fallback. Throws ConfigError
// when the variable is not an unsigned integer.
std::uint64_t seed_from_environment(std::uint64_t fallback);

}  // namespace nilwalk
