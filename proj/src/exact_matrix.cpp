#include "nilwalk/exact_matrix.hpp"

#include <stdexcept>

#include "nilwalk/errors.hpp"

namespace nilwalk {

ExactMatrix ExactMatrix::identity(int n) {
  ExactMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ExactMatrix ExactMatrix::unit(int n, int row, int col) {
  ExactMatrix m(n);
  m(row, col) = 1;
  return m;
}

bool ExactMatrix::is_zero() const {
  for (const auto& x : data_)
    if (sgn(x) != 0) return false;
  return true;
}

bool ExactMatrix::is_unipotent_upper() const {
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 1) return false;
    for (int j = 0; j < i; ++j)
      if (sgn((*this)(i, j)) != 0) return false;
  }
  return true;
}

ExactMatrix& ExactMatrix::operator+=(const ExactMatrix& o) {
  if (o.n_ != n_) throw StructuralError("matrix size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ExactMatrix& ExactMatrix::operator-=(const ExactMatrix& o) {
  if (o.n_ != n_) throw StructuralError("matrix size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ExactMatrix& ExactMatrix::operator*=(const Rational& s) {
  for (auto& x : data_) x *= s;
  return *this;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.dim() != b.dim()) throw StructuralError("matrix size mismatch");
  const int n = a.dim();
  ExactMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (sgn(a(i, k)) == 0) continue;
      for (int j = 0; j < n; ++j)
        if (sgn(b(k, j)) != 0) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

ExactMatrix nilpotent_exp(const ExactMatrix& m) {
  const int n = m.dim();
  ExactMatrix out = ExactMatrix::identity(n);
  ExactMatrix term = ExactMatrix::identity(n);  // m^k / k!
  for (int k = 1; k <= n; ++k) {
    term = term * m;
    term *= Rational(1, k);
    if (term.is_zero()) return out;
    out += term;
  }
  if (!(term * m).is_zero()) throw MathError("matrix is not nilpotent");
  return out;
}

ExactMatrix unipotent_log(const ExactMatrix& u) {
  const int n = u.dim();
  ExactMatrix a = u - ExactMatrix::identity(n);
  ExactMatrix out(n);
  ExactMatrix power = ExactMatrix::identity(n);
  for (int k = 1; k <= n; ++k) {
    power = power * a;
    if (power.is_zero()) return out;
    out += power * Rational(k % 2 == 1 ? 1 : -1, k);
  }
  if (!(power * a).is_zero()) throw MathError("matrix is not unipotent");
  return out;
}

std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs,
                                  bool& consistent) {
  const int m = static_cast<int>(rows.size());
  const int n = m == 0 ? 0 : static_cast<int>(rows.front().size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < n && r < m; ++c) {
    int p = r;
    while (p < m && sgn(rows[p][c]) == 0) ++p;
    if (p == m) continue;
    std::swap(rows[p], rows[r]);
    std::swap(rhs[p], rhs[r]);
    const Rational inv = 1 / rows[r][c];
    for (int j = c; j < n; ++j) rows[r][j] *= inv;
    rhs[r] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      const Rational f = rows[i][c];
      for (int j = c; j < n; ++j) rows[i][j] -= f * rows[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  consistent = true;
  for (int i = r; i < m; ++i)
    if (sgn(rhs[i]) != 0) consistent = false;
  if (static_cast<int>(pivot_col.size()) != n) consistent = false;
  if (!consistent) return {};
  std::vector<Rational> x(n);
  for (int i = 0; i < r; ++i) x[pivot_col[i]] = rhs[i];
  return x;
}

}  // namespace nilwalk
