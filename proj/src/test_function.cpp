#include "nilwalk/test_function.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nilwalk/errors.hpp"

namespace nilwalk {
namespace {

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0; }

double bump_derivative(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double s = 1.0 - u * u;
  return bump(u) * (-2.0 * u / (s * s));
}

double bump_integral() {
  static const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, -1.0, 1.0, 15, 1e-14);
  return v;
}

double bump_slope() {
  static const double v = [] {
    double best = 0.0;
    for (int i = 0; i <= 20000; ++i) best = std::max(best, std::abs(bump_derivative(-1.0 + i * 1e-4)));
    return best * 1.01;
  }();
  return v;
}

// Distribution function of the kernel (35/32)(1 - v^2)^3 on [-1, 1].
double kernel_cdf(double v) {
  if (v <= -1.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const double v2 = v * v;
  return 0.5 + 35.0 / 32.0 * v * (1.0 - v2 + 0.6 * v2 * v2 - v2 * v2 * v2 / 7.0);
}

}  // namespace

std::string to_string(TestFunctionSpec::Kind k) {
  switch (k) {
    case TestFunctionSpec::Kind::kProductTent: return "product-tent";
    case TestFunctionSpec::Kind::kSmoothBump: return "smooth-bump";
    case TestFunctionSpec::Kind::kSmoothedIndicator: return "smoothed-indicator";
  }
  return "product-tent";
}

double TestFunctionSpec::operator()(std::span<const double> x) const {
  const double half = 0.5 * box;
  double v = 1.0;
  for (int c = 0; c < dim && v != 0.0; ++c) {
    switch (kind) {
      case Kind::kProductTent:
        v *= std::max(0.0, 1.0 - std::abs(x[c]) / half);
        break;
      case Kind::kSmoothBump:
        v *= bump(x[c] / half);
        break;
      case Kind::kSmoothedIndicator:
        v *= kernel_cdf(smoothing * (x[c] + half)) - kernel_cdf(smoothing * (x[c] - half));
        break;
    }
  }
  return v;
}

double TestFunctionSpec::l1_norm() const {
  switch (kind) {
    case Kind::kProductTent: return std::pow(0.5 * box, dim);
    case Kind::kSmoothBump: return std::pow(0.5 * box * bump_integral(), dim);
    case Kind::kSmoothedIndicator: return std::pow(box, dim);
  }
  return 0.0;
}

double TestFunctionSpec::lipschitz() const {
  const double root = std::sqrt(static_cast<double>(dim));
  switch (kind) {
    case Kind::kProductTent: return root * 2.0 / box;
    case Kind::kSmoothBump: return root * bump_slope() * 2.0 / box;
    case Kind::kSmoothedIndicator: return root * smoothing * 35.0 / 32.0;
  }
  return 0.0;
}

double TestFunctionSpec::support_radius() const {
  return kind == Kind::kSmoothedIndicator ? 0.5 * box + 1.0 / smoothing : 0.5 * box;
}

nlohmann::json TestFunctionSpec::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)}, {"box", box}, {"l1_norm", l1_norm()}, {"lipschitz", lipschitz()}};
  if (kind == Kind::kSmoothedIndicator) j["smoothing"] = smoothing;
  return j;
}

TestFunctionSpec test_function_from_json(const nlohmann::json& j, int dim) {
  TestFunctionSpec f;
  f.dim = dim;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "product-tent") f.kind = TestFunctionSpec::Kind::kProductTent;
    else if (kind == "smooth-bump") f.kind = TestFunctionSpec::Kind::kSmoothBump;
    else if (kind == "smoothed-indicator") f.kind = TestFunctionSpec::Kind::kSmoothedIndicator;
    else throw ConfigError("unknown test function kind " + kind);
    f.box = j.at("box").get<double>();
    if (f.kind == TestFunctionSpec::Kind::kSmoothedIndicator) f.smoothing = j.at("smoothing").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("test function: ") + e.what());
  }
  if (!(f.box > 0.0)) throw ConfigError("test function box must be positive");
  if (f.kind == TestFunctionSpec::Kind::kSmoothedIndicator && !(f.smoothing > 0.0))
    throw ConfigError("smoothed indicator needs a positive smoothing scale");
  return f;
}

double default_smoothing(double l1_norm, int homogeneous_dim, int n) {
  return std::pow(static_cast<double>(n), 0.5 * (homogeneous_dim + 1)) / l1_norm;
}

}  // namespace nilwalk
