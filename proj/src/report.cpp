#include "nilwalk/report.hpp"

namespace nilwalk {

std::string to_string(LemmaStatus s) {
  switch (s) {
    case LemmaStatus::kPass: return "pass";
    case LemmaStatus::kFail: return "fail";
    case LemmaStatus::kNotApplicable: return "not_applicable";
  }
  return "fail";
}

void LemmaReport::fail(std::string detail) {
  status = LemmaStatus::kFail;
  if (!witness) witness = detail;
  violations.push_back(std::move(detail));
}

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json j{{"check", check}, {"parameters", parameters}, {"status", to_string(status)}};
  if (witness) j["witness"] = *witness;
  if (violations.size() > 1) j["violation_count"] = violations.size();
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace nilwalk
