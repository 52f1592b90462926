#pragma once

#include <vector>

#include <nlohmann/json.hpp>

namespace nilwalk {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double confidence = 0.95;
  int points = 0;
  bool weighted = false;
  bool excludes(double v) const { return v < ci_lo || v > ci_hi; }
  nlohmann::json to_json() const;
};

// Least squares of log y on log x, weighted by the inverse variance of log y
// (delta method from the standard errors) when all errors are positive.
// The interval uses the t distribution with points - 2 degrees of freedom.
// Throws std::invalid_argument for fewer than 3 points or nonpositive values.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& std_error, double confidence = 0.95);

}  // namespace nilwalk
