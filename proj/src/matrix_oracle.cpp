#include "nilwalk/matrix_oracle.hpp"

#include "nilwalk/errors.hpp"

namespace nilwalk {

ExactMatrix to_matrix(const MatrixRepresentation& rep, const ExactVector& x) {
  if (x.size() != static_cast<int>(rep.basis_images.size()))
    throw StructuralError("vector does not match representation");
  ExactMatrix m(rep.matrix_dim());
  for (int c = 0; c < x.size(); ++c)
    if (sgn(x[c]) != 0) m += rep.basis_images[c] * x[c];
  return m;
}

ExactVector from_matrix(const MatrixRepresentation& rep, const ExactMatrix& m) {
  const int q = static_cast<int>(rep.basis_images.size());
  const int n = rep.matrix_dim();
  if (m.dim() != n) throw StructuralError("matrix does not match representation");
  std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(n) * n, std::vector<Rational>(q));
  for (int c = 0; c < q; ++c)
    for (int e = 0; e < n * n; ++e) rows[e][c] = rep.basis_images[c].entries()[e];
  bool ok = false;
  auto x = solve_exact(std::move(rows), m.entries(), ok);
  if (!ok) throw MathError("matrix is not in the span of the basis images");
  return ExactVector(std::move(x));
}

ExactVector matrix_oracle_product(const GroupCatalogEntry& entry, const std::vector<ExactVector>& xs) {
  if (!entry.representation) throw MathError("no oracle");
  if (xs.empty()) throw std::invalid_argument("product of an empty sequence");
  const auto& rep = *entry.representation;
  ExactMatrix acc = ExactMatrix::identity(rep.matrix_dim());
  for (const auto& x : xs) {
    check_dim(entry.algebra, x);
    acc = acc * nilpotent_exp(to_matrix(rep, x));
  }
  return from_matrix(rep, unipotent_log(acc));
}

}  // namespace nilwalk
