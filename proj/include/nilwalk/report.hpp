#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nilwalk {

enum class LemmaStatus { kPass, kFail, kNotApplicable };

std::string to_string(LemmaStatus s);

// Outcome of one exact identity check.
struct LemmaReport {
  std::string check;
  nlohmann::json parameters = nlohmann::json::object();
  LemmaStatus status = LemmaStatus::kPass;
  std::optional<std::string> witness;
  std::vector<std::string> violations;
  std::string note;

  bool passed() const { return status != LemmaStatus::kFail; }

  // Records a violation and marks the report failed; the first one is the witness.
  void fail(std::string detail);

  nlohmann::json to_json() const;
};

}  // namespace nilwalk
