#pragma once

#include <vector>

#include "nilwalk/rational.hpp"

namespace nilwalk {

// Small dense square matrix with exact entries.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  explicit ExactMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {}

  static ExactMatrix identity(int n);
  static ExactMatrix unit(int n, int row, int col);  // E_{row,col}, 0-based

  int dim() const { return n_; }
  Rational& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const Rational& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  const std::vector<Rational>& entries() const { return data_; }

  bool is_zero() const;
  bool is_unipotent_upper() const;

  ExactMatrix& operator+=(const ExactMatrix& o);
  ExactMatrix& operator-=(const ExactMatrix& o);
  ExactMatrix& operator*=(const Rational& s);
  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  friend ExactMatrix operator*(ExactMatrix a, const Rational& s) { return a *= s; }
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  bool operator==(const ExactMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<Rational> data_;
};

// Finite exponential series of a nilpotent matrix.
ExactMatrix nilpotent_exp(const ExactMatrix& m);

// Finite logarithm series of a unipotent matrix.
ExactMatrix unipotent_log(const ExactMatrix& u);

// Exact solution of A x = b for a full-column-rank system given as rows;
// returns nullopt-like empty vector when inconsistent.
std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs,
                                  bool& consistent);

}  // namespace nilwalk
