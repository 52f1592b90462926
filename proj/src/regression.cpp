#include "nilwalk/regression.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace nilwalk {

nlohmann::json PowerLawFit::to_json() const {
  return {{"slope", slope},   {"intercept", intercept},   {"slope_se", slope_se}, {"ci", {ci_lo, ci_hi}},
          {"points", points}, {"confidence", confidence}, {"weighted", weighted}};
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& std_error, double confidence) {
  const std::size_t n = x.size();
  if (n != y.size() || n != std_error.size()) throw std::invalid_argument("fit: mismatched lengths");
  if (n < 3) throw std::invalid_argument("fit: need at least 3 points");
  PowerLawFit fit;
  fit.points = static_cast<int>(n);
  fit.confidence = confidence;
  fit.weighted = true;
  std::vector<double> lx(n), ly(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    if (!(std_error[i] > 0.0)) fit.weighted = false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double rel = std_error[i] / y[i];
    w[i] = fit.weighted ? 1.0 / (rel * rel) : 1.0;
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit: x values must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += w[i] * r * r;
  }
  const double dof = static_cast<double>(n - 2);
  fit.slope_se = std::sqrt(rss / dof / sxx);
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
  fit.ci_lo = fit.slope - tq * fit.slope_se;
  fit.ci_hi = fit.slope + tq * fit.slope_se;
  return fit;
}

}  // namespace nilwalk
