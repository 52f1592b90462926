#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "nilwalk/rational.hpp"

namespace nilwalk {

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

// Coordinates of a Lie algebra element in the fixed graded basis. The scalar
// type fixes the layer: Rational (symbolic) or double (Monte Carlo).
template <class S>
class LieVector {
 public:
  using Scalar = S;

  LieVector() = default;
  explicit LieVector(std::vector<S> coords) : coords_(std::move(coords)) {}
  LieVector(std::initializer_list<S> coords) : coords_(coords) {}

  static LieVector zero(int dim) { return LieVector(std::vector<S>(dim, S(0))); }

  int size() const { return static_cast<int>(coords_.size()); }
  S& operator[](int i) { return coords_[i]; }
  const S& operator[](int i) const { return coords_[i]; }
  const std::vector<S>& coords() const { return coords_; }
  std::vector<S>& coords() { return coords_; }

  bool is_zero_vector() const {
    for (const auto& c : coords_)
      if (!is_zero(c)) return false;
    return true;
  }

  LieVector operator-() const {
    LieVector out = *this;
    for (auto& c : out.coords_) c = -c;
    return out;
  }
  LieVector& operator+=(const LieVector& o) {
    for (int i = 0; i < size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  LieVector& operator-=(const LieVector& o) {
    for (int i = 0; i < size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  LieVector& operator*=(const S& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }
  friend LieVector operator+(LieVector a, const LieVector& b) { return a += b; }
  friend LieVector operator-(LieVector a, const LieVector& b) { return a -= b; }
  friend LieVector operator*(const S& s, LieVector a) { return a *= s; }

  bool operator==(const LieVector&) const = default;

 private:
  std::vector<S> coords_;
};

using ExactVector = LieVector<Rational>;
using FloatVector = LieVector<double>;

inline FloatVector to_float(const ExactVector& x) {
  std::vector<double> c(x.size());
  for (int i = 0; i < x.size(); ++i) c[i] = to_double(x[i]);
  return FloatVector(std::move(c));
}

}  // namespace nilwalk
