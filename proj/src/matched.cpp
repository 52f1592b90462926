#include <cmath>

#include <Eigen/Dense>

#include "nilwalk/errors.hpp"
#include "nilwalk/measure.hpp"

namespace nilwalk {
namespace {

constexpr double kSkeletonShrink = 0.99;
constexpr double kTolerance = 1e-10;

Monomial product_of(std::initializer_list<int> coords) {
  std::map<int, int> count;
  for (int c : coords) ++count[c];
  std::vector<VarPower> f;
  for (auto [c, e] : count) f.push_back({{1, c}, e});
  return Monomial::from_factors(std::move(f));
}

double moment_d(const Measure& mu, std::initializer_list<int> coords) {
  return to_double(mu.moment(product_of(coords)));
}

// Level-1 part of one mixture component: x1 = offset + A u.
struct Part {
  Rational weight;
  Eigen::VectorXd offset;
  Eigen::MatrixXd A;
  std::vector<Latent> latents;
};

// Unit-variance uniform latents on [-1, 1] scaled by sqrt(3).
void add_unit_uniforms(Part& part, const Eigen::MatrixXd& map) {
  const Eigen::Index old = part.A.cols();
  part.A.conservativeResize(map.rows(), old + map.cols());
  part.A.rightCols(map.cols()) = std::sqrt(3.0) * map;
  for (Eigen::Index k = 0; k < map.cols(); ++k) part.latents.push_back(Latent::uniform(-1, 1));
}

std::vector<Part> moment_parts(const Measure& mu, const Eigen::MatrixXd& unwhiten, const Eigen::MatrixXd& whiten,
                               int d1) {
  const int r = static_cast<int>(whiten.rows());
  Part part{1, Eigen::VectorXd::Zero(d1), Eigen::MatrixXd::Zero(d1, 0), {}};
  if (r == 0) return {part};

  // third moment tensor in whitened coordinates
  std::vector<double> t(r * r * r, 0.0);
  std::vector<double> raw(d1 * d1 * d1);
  for (int a = 0; a < d1; ++a)
    for (int b = a; b < d1; ++b)
      for (int c = b; c < d1; ++c) {
        const double v = moment_d(mu, {a, b, c});
        for (auto [x, y, z] : {std::array{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}})
          raw[(x * d1 + y) * d1 + z] = v;
      }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        double s = 0.0;
        for (int a = 0; a < d1; ++a)
          for (int b = 0; b < d1; ++b)
            for (int c = 0; c < d1; ++c) s += whiten(i, a) * whiten(j, b) * whiten(k, c) * raw[(a * d1 + b) * d1 + c];
        t[(i * r + j) * r + k] = s;
      }

  // rank-one directions spanning symmetric 3-tensors
  std::vector<Eigen::VectorXd> dirs;
  auto unit = [&](int i) { return Eigen::VectorXd::Unit(r, i); };
  for (int i = 0; i < r; ++i) dirs.push_back(unit(i));
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      dirs.push_back(unit(i) + unit(j));
      dirs.push_back(unit(i) - unit(j));
    }
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      for (int k = j + 1; k < r; ++k) dirs.push_back(unit(i) + unit(j) + unit(k));
  const int n = static_cast<int>(dirs.size());
  Eigen::MatrixXd sys(n, n);
  Eigen::VectorXd rhs(n);
  int row = 0;
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j)
      for (int k = j; k < r; ++k, ++row) {
        rhs(row) = t[(i * r + j) * r + k];
        for (int v = 0; v < n; ++v) sys(row, v) = dirs[v](i) * dirs[v](j) * dirs[v](k);
      }
  const Eigen::VectorXd weights = sys.fullPivLu().solve(rhs);

  Eigen::MatrixXd rest = Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd white_map(r, 0);
  for (int v = 0; v < n; ++v) {
    const double tv = weights(v);
    if (std::abs(tv) < 1e-15) continue;
    const double var = 0.5 / (n * dirs[v].squaredNorm());
    // mean 0, variance var, third moment tv
    const double s = tv / var;
    const double disc = std::sqrt(s * s + 4.0 * var);
    const double hi = 0.5 * (s + disc), lo = 0.5 * (s - disc);
    const Rational lo_q(lo), hi_q(hi);
    const Rational p = -lo_q / (hi_q - lo_q);
    part.latents.push_back(Latent::two_point(lo_q, hi_q, p));
    white_map.conservativeResize(r, white_map.cols() + 1);
    white_map.rightCols(1) = dirs[v];
    rest -= var * dirs[v] * dirs[v].transpose();
  }
  part.A = unwhiten * white_map;
  Eigen::LLT<Eigen::MatrixXd> chol(rest);
  if (chol.info() != Eigen::Success) throw MathError("matched measure: residual covariance is not positive");
  add_unit_uniforms(part, unwhiten * Eigen::MatrixXd(chol.matrixL()));
  return {part};
}

std::vector<Part> skeleton_parts(const Measure& mu, const Eigen::MatrixXd& unwhiten, int d1) {
  std::vector<Part> parts;
  const double lam = kSkeletonShrink;
  for (std::size_t a = 0; a < mu.atoms().size(); ++a) {
    Part p{mu.weights()[a], Eigen::VectorXd(d1), Eigen::MatrixXd::Zero(d1, 0), {}};
    for (int c = 0; c < d1; ++c) p.offset(c) = lam * to_double(mu.atoms()[a][c]);
    add_unit_uniforms(p, std::sqrt(1.0 - lam * lam) * unwhiten);
    parts.push_back(std::move(p));
  }
  return parts;
}

}  // namespace

Measure matched_measure(const Measure& mu, const LieAlgebra& algebra, MatchStrategy strategy) {
  const auto& basis = algebra.basis();
  if (mu.dim() != basis.total_dim()) throw StructuralError("measure does not match the algebra");
  const int d1 = basis.dim(1), q = basis.total_dim();
  for (int c = 0; c < d1; ++c)
    if (sgn(mu.moment(product_of({c}))) != 0) throw MathError("matched measure needs a centered measure");
  if (strategy == MatchStrategy::kAuto && mu.is_compact_continuous()) return mu;

  bool symmetric3 = true;
  for (int a = 0; a < d1 && symmetric3; ++a)
    for (int b = a; b < d1 && symmetric3; ++b)
      for (int c = b; c < d1 && symmetric3; ++c) symmetric3 = sgn(mu.moment(product_of({a, b, c}))) == 0;
  if (strategy == MatchStrategy::kSkeleton && (mu.kind() != Measure::Kind::kDiscrete || !symmetric3))
    throw MathError("skeleton matching needs an atomic measure with vanishing third moments");
  const bool skeleton = strategy == MatchStrategy::kSkeleton ||
                        (strategy == MatchStrategy::kAuto && mu.kind() == Measure::Kind::kDiscrete && symmetric3);

  Eigen::MatrixXd sigma(d1, d1);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d1; ++b) sigma(a, b) = moment_d(mu, {a, b});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const double cutoff = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<int> keep;
  for (int i = 0; i < d1; ++i)
    if (eig.eigenvalues()(i) > cutoff) keep.push_back(i);
  const int r = static_cast<int>(keep.size());
  Eigen::MatrixXd unwhiten(d1, r), whiten(r, d1), pinv = Eigen::MatrixXd::Zero(d1, d1);
  for (int k = 0; k < r; ++k) {
    const double ev = eig.eigenvalues()(keep[k]);
    const Eigen::VectorXd u = eig.eigenvectors().col(keep[k]);
    unwhiten.col(k) = std::sqrt(ev) * u;
    whiten.row(k) = u.transpose() / std::sqrt(ev);
    pinv += u * u.transpose() / ev;
  }

  std::vector<Part> parts = skeleton ? skeleton_parts(mu, unwhiten, d1) : moment_parts(mu, unwhiten, whiten, d1);

  // higher coordinates: mean, linear regression on level 1, independent noise
  const double scale = d1 > 0 ? sigma.trace() / d1 : 0.0;
  std::vector<Rational> mean_exact(q);
  std::vector<double> mean(q, 0.0), noise(q, 0.0);
  std::vector<Eigen::VectorXd> slope(q, Eigen::VectorXd::Zero(d1));
  for (int c = d1; c < q; ++c) {
    mean_exact[c] = mu.moment(product_of({c}));
    mean[c] = to_double(mean_exact[c]);
    double var = moment_d(mu, {c, c}) - mean[c] * mean[c];
    if (basis.level_of(c) == 2) {
      Eigen::VectorXd cross(d1);
      for (int a = 0; a < d1; ++a) cross(a) = moment_d(mu, {c, a});
      slope[c] = pinv * cross;
      var -= slope[c].dot(sigma * slope[c]);
    }
    const double level_scale = std::pow(scale, basis.level_of(c));
    noise[c] = var > 1e-14 * std::max(1.0, level_scale * level_scale) ? var : std::max(1e-2 * level_scale * level_scale, 1e-8);
  }

  std::vector<Measure> comps;
  std::vector<Rational> weights;
  for (const auto& p : parts) {
    std::vector<Latent> latents = p.latents;
    const int base = static_cast<int>(latents.size());
    std::vector<std::vector<Rational>> coef(q, std::vector<Rational>(base + q - d1, Rational(0)));
    ExactVector offset = ExactVector::zero(q);
    for (int c = 0; c < d1; ++c) {
      offset[c] = Rational(p.offset(c));
      for (int l = 0; l < base; ++l) coef[c][l] = Rational(p.A(c, l));
    }
    for (int c = d1; c < q; ++c) {
      offset[c] = mean_exact[c] + Rational(slope[c].dot(p.offset));
      const Eigen::RowVectorXd row = slope[c].transpose() * p.A;
      for (int l = 0; l < base; ++l) coef[c][l] = Rational(row(l));
      coef[c][base + c - d1] = Rational(std::sqrt(3.0 * noise[c]));
      latents.push_back(Latent::uniform(-1, 1));
    }
    comps.push_back(Measure::affine(std::move(latents), std::move(offset), std::move(coef)));
    weights.push_back(p.weight);
  }
  Measure phi = comps.size() == 1 ? comps.front() : Measure::mixture(std::move(comps), std::move(weights));
  const double err = moment_mismatch(mu, phi, basis, 3);
  if (!(err <= kTolerance))
    throw MathError("matched measure misses the moments by " + std::to_string(err));
  return phi;
}

}  // namespace nilwalk
