#include <algorithm>
#include <cmath>
#include <numbers>

#include "nilwalk/errors.hpp"
#include "nilwalk/measure.hpp"

namespace nilwalk {
namespace {

constexpr int kShells = 8;
constexpr int kRefineStarts = 8;
constexpr double kInconclusiveBelow = 1e-3;

// Unit directions covering a half sphere (the modulus is even in xi).
std::vector<std::vector<double>> directions(int d, int density) {
  std::vector<std::vector<double>> out;
  if (d == 1) {
    out.push_back({1.0});
  } else if (d == 2) {
    for (int j = 0; j < density; ++j) {
      const double t = std::numbers::pi * j / density;
      out.push_back({std::cos(t), std::sin(t)});
    }
  } else if (d == 3) {
    const int n = std::max(8, density * density / 4);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (i + 0.5) / n;  // upper hemisphere
      const double rho = std::sqrt(1.0 - z * z);
      out.push_back({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
    }
  } else {
    // Halton points in the cube, projected to the sphere
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (d > 16) throw ResourceError("cramer grid supports level-1 dimension up to 16");
    const int n = density * density;
    for (int i = 1; out.size() < static_cast<std::size_t>(n); ++i) {
      std::vector<double> v(d);
      double norm = 0.0;
      for (int k = 0; k < d; ++k) {
        double f = 1.0, r = 0.0;
        for (int m = i; m > 0; m /= primes[k]) {
          f /= primes[k];
          r += f * (m % primes[k]);
        }
        v[k] = 2.0 * r - 1.0;
        norm += v[k] * v[k];
      }
      if (norm < 1e-6 || norm > 1.0) continue;
      for (auto& x : v) x /= std::sqrt(norm);
      out.push_back(std::move(v));
    }
  }
  return out;
}

void collect_atoms(const Measure& mu, std::vector<ExactVector>& atoms, bool& discrete) {
  switch (mu.kind()) {
    case Measure::Kind::kDiscrete:
      atoms.insert(atoms.end(), mu.atoms().begin(), mu.atoms().end());
      return;
    case Measure::Kind::kAffine:
      discrete = false;
      return;
    case Measure::Kind::kMixture:
      for (const auto& c : mu.components()) collect_atoms(c, atoms, discrete);
      return;
  }
}

// Every rational atomic law lives on a translate of a lattice; along an axis
// the modulus is 1 at multiples of 1/g with g the gcd of coordinate gaps.
std::optional<std::vector<double>> lattice_witness(const Measure& mu, int d1, double r_min, double r_max) {
  std::vector<ExactVector> atoms;
  bool discrete = true;
  collect_atoms(mu, atoms, discrete);
  if (!discrete || atoms.empty()) return std::nullopt;
  std::optional<std::vector<double>> best;
  double best_norm = 0.0;
  for (int c = 0; c < d1; ++c) {
    Rational g = 0;
    for (const auto& a : atoms) g = rational_gcd(g, Rational(abs(Rational(a[c] - atoms[0][c]))));
    double r;
    if (sgn(g) == 0) {
      r = 0.5 * (r_min + r_max);
    } else {
      const double step = 1.0 / to_double(g);
      r = (std::floor(r_min / step) + 1.0) * step;
    }
    if (r <= r_min || r > r_max) continue;
    if (!best || r < best_norm) {
      best = std::vector<double>(d1, 0.0);
      (*best)[c] = r;
      best_norm = r;
    }
  }
  return best;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string to_string(CramerReport::Verdict v) {
  switch (v) {
    case CramerReport::Verdict::kSatisfies: return "satisfies";
    case CramerReport::Verdict::kFails: return "fails";
    case CramerReport::Verdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::json CramerReport::to_json() const {
  nlohmann::json shells_j = nlohmann::json::array();
  for (const auto& s : shells) shells_j.push_back({{"r_lo", s.r_lo}, {"r_hi", s.r_hi}, {"sup", s.sup}});
  nlohmann::json j = {{"verdict", nilwalk::to_string(verdict)},
                      {"r_min", r_min},
                      {"r_max", r_max},
                      {"directions", directions},
                      {"sup", sup},
                      {"margin", margin},
                      {"argmax", argmax},
                      {"shells", shells_j}};
  if (witness) j["witness"] = *witness;
  return j;
}

CramerReport cramer_check(const Measure& mu, const GradedBasis& basis, double r_min, double r_max, int density) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("cramer check needs 0 < r_min < r_max");
  if (density < 4) throw std::invalid_argument("cramer grid density must be at least 4");
  if (mu.dim() != basis.total_dim()) throw StructuralError("measure does not match the algebra");
  const int d1 = basis.dim(1);
  CramerReport rep;
  rep.r_min = r_min;
  rep.r_max = r_max;

  auto modulus = [&](const std::vector<double>& xi) { return std::abs(mu.abelian_char_fn(basis, xi)); };

  const auto dirs = directions(d1, density);
  rep.directions = static_cast<int>(dirs.size());
  const int radial = d1 >= 3 ? std::max(8, density / 2) : density;
  const double width = (r_max - r_min) / kShells;
  // just inside the open inner boundary
  const double inner = r_min + std::max(1e-12, 1e-12 * r_min);

  struct Point {
    double value;
    std::vector<double> xi;
  };
  std::vector<Point> best;
  for (int s = 0; s < kShells; ++s) rep.shells.push_back({r_min + s * width, r_min + (s + 1) * width, 0.0});
  auto shell_of = [&](double r) { return std::clamp(static_cast<int>((r - r_min) / width), 0, kShells - 1); };
  auto record = [&](const std::vector<double>& xi, double v) {
    auto& sh = rep.shells[shell_of(norm(xi))];
    sh.sup = std::max(sh.sup, v);
    if (v > rep.sup || rep.argmax.empty()) {
      rep.sup = v;
      rep.argmax = xi;
    }
  };

  std::vector<double> xi(d1);
  for (const auto& dir : dirs) {
    for (int s = 0; s < kShells; ++s) {
      for (int k = 0; k < radial; ++k) {
        double r = rep.shells[s].r_lo + width * k / radial;
        if (s == 0 && k == 0) r = inner;
        for (int c = 0; c < d1; ++c) xi[c] = r * dir[c];
        const double v = modulus(xi);
        record(xi, v);
        if (best.size() < kRefineStarts || v > best.back().value) {
          best.push_back({v, xi});
          std::sort(best.begin(), best.end(), [](const Point& a, const Point& b) { return a.value > b.value; });
          if (best.size() > kRefineStarts) best.pop_back();
        }
      }
    }
    if (rep.shells.back().r_hi > 0) {
      for (int c = 0; c < d1; ++c) xi[c] = r_max * dir[c];
      record(xi, modulus(xi));
    }
  }

  // Hooke-Jeeves on each of the best grid points, kept inside the annulus.
  auto project = [&](std::vector<double>& p) {
    const double n = norm(p);
    if (n <= 0.0) return;
    const double r = std::clamp(n, inner, r_max);
    for (auto& x : p) x *= r / n;
  };
  for (auto start : best) {
    std::vector<double> p = start.xi;
    double fp = start.value;
    double h = width / radial;
    while (h > 1e-10) {
      bool improved = false;
      for (int c = 0; c < d1; ++c) {
        for (double sgn_step : {1.0, -1.0}) {
          std::vector<double> q = p;
          q[c] += sgn_step * h;
          project(q);
          const double fq = modulus(q);
          if (fq > fp) {
            p = std::move(q);
            fp = fq;
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    record(p, fp);
  }

  if (auto w = lattice_witness(mu, d1, r_min, r_max); w && modulus(*w) > 1.0 - 1e-9) {
    rep.witness = w;
    record(*w, modulus(*w));
    rep.verdict = CramerReport::Verdict::kFails;
  } else if (rep.sup > 1.0 - kInconclusiveBelow) {
    rep.verdict = CramerReport::Verdict::kInconclusive;
  } else {
    rep.verdict = CramerReport::Verdict::kSatisfies;
  }
  rep.margin = 1.0 - rep.sup;
  return rep;
}

}  // namespace nilwalk
