#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "ergolab/linalg.hpp"

namespace ergolab {

/// A point of K/M, stored as its canonical orthogonal frame.
///
/// Canonical form: in each of the first n-1 columns the entry of largest
/// absolute value is positive (ties go to the smallest row index); the sign
/// of the last column is then forced by det = +1. Frames that differ by an
/// element of M (diagonal signs, det 1) canonicalize identically.
///
/// For n = 2 the point is equivalently an angle in [0, pi).
class BoundaryPoint {
 public:
  BoundaryPoint() = default;

  /// Canonicalizes an SO(n) frame. The input is assumed orthogonal with det +1.
  static BoundaryPoint from_frame(const Mat& k) {
    const int n = static_cast<int>(k.rows());
    require_dimension(n);
    if (n == 2) return from_line2(k(0, 0), k(1, 0));
    BoundaryPoint b;
    b.n_ = n;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) b.f_[j * 3 + i] = k(i, j);
    int flips = 0;
    for (int j = 0; j + 1 < n; ++j) {
      int best = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(b.f_[j * 3 + i]) > std::abs(b.f_[j * 3 + best])) best = i;
      if (b.f_[j * 3 + best] < 0) {
        for (int i = 0; i < n; ++i) b.f_[j * 3 + i] = -b.f_[j * 3 + i];
        ++flips;
      }
    }
    if (flips % 2 == 1)
      for (int i = 0; i < n; ++i) b.f_[(n - 1) * 3 + i] = -b.f_[(n - 1) * 3 + i];
    return b;
  }

  /// n = 2: the point whose frame has first column proportional to (c, s).
  static BoundaryPoint from_line2(double c, double s) {
    BoundaryPoint b;
    b.n_ = 2;
    const bool second = std::abs(s) > std::abs(c);
    if ((second ? s : c) < 0) {
      c = -c;
      s = -s;
    }
    b.f_[0] = c;
    b.f_[1] = s;
    b.f_[3] = -s;
    b.f_[4] = c;
    return b;
  }

  static BoundaryPoint from_angle(double theta) { return from_line2(std::cos(theta), std::sin(theta)); }

  int n() const { return n_; }
  double operator()(int i, int j) const { return f_[j * 3 + i]; }

  Mat frame() const {
    Mat k(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) k(i, j) = f_[j * 3 + i];
    return k;
  }

  /// First column: the line of the flag, defined up to sign.
  std::array<double, 3> line() const { return {f_[0], f_[1], n_ == 3 ? f_[2] : 0.0}; }

  /// n = 2: angle in [0, pi). For n = 3: azimuth of the line, mod pi.
  double angle() const {
    double a = std::atan2(f_[1], f_[0]);
    if (a < 0) a += std::numbers::pi;
    if (a >= std::numbers::pi) a = 0.0;
    return a;
  }

 private:
  int n_ = 0;
  std::array<double, 9> f_{};
};

/// Arc distance on RP^1 for n = 2; M-minimized Frobenius distance of frames for n = 3.
inline double boundary_distance(const BoundaryPoint& a, const BoundaryPoint& b) {
  if (a.n() != b.n()) throw DimensionMismatch("boundary points of different dimension");
  if (a.n() == 2) {
    const double d = std::abs(a.angle() - b.angle());
    return std::min(d, std::numbers::pi - d);
  }
  static constexpr std::array<std::array<double, 3>, 4> signs{
      {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
  double best = INFINITY;
  for (const auto& m : signs) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const double d = a(i, j) - m[j] * b(i, j);
        s += d * d;
      }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

/// Largest diameter of K/M under boundary_distance.
inline double boundary_diameter(int n) {
  require_dimension(n);
  // n = 3: frames differing by a half-turn not in M are at Frobenius distance <= 2; sqrt(8) bounds it.
  return n == 2 ? std::numbers::pi / 2 : std::sqrt(8.0);
}

}  // namespace ergolab
