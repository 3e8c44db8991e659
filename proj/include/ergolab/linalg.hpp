#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "ergolab/errors.hpp"

namespace ergolab {

/// Small dense matrix with at most 3x3 entries, stored inline.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline void require_dimension(int n) {
  if (n != 2 && n != 3) throw UnsupportedDimension(n);
}

inline constexpr double kDetTolerance = 1e-9;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kChamberTolerance = 1e-12;

/// An element of SL(n, R), n in {2, 3}. Validated at construction.
class MatrixElement {
 public:
  explicit MatrixElement(const Mat& m) : m_(m) {
    if (m.rows() != m.cols()) throw ValidationError("matrix must be square");
    require_dimension(static_cast<int>(m.rows()));
    const double det = m.determinant();
    if (!(std::abs(det - 1.0) <= kDetTolerance))
      throw ValidationError("matrix determinant " + std::to_string(det) + " is not 1");
  }

  MatrixElement(int n, std::initializer_list<double> row_major) : MatrixElement(from_rows(n, row_major)) {}

  static MatrixElement identity(int n) {
    require_dimension(n);
    return MatrixElement(Mat::Identity(n, n));
  }

  int n() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Exact adjugate formula; the determinant is 1 up to the construction tolerance,
  /// so we still divide by it to keep g * g^-1 = I to rounding.
  MatrixElement inverse() const {
    Mat inv = m_.inverse();
    return MatrixElement(unchecked, inv);
  }

  friend MatrixElement operator*(const MatrixElement& a, const MatrixElement& b) {
    if (a.n() != b.n()) throw DimensionMismatch("product of elements of different dimension");
    Mat p = a.m_ * b.m_;
    return MatrixElement(unchecked, p);
  }

 private:
  struct Unchecked {};
  static constexpr Unchecked unchecked{};
  MatrixElement(Unchecked, const Mat& m) : m_(m) {}

  static Mat from_rows(int n, std::initializer_list<double> vals) {
    require_dimension(n);
    if (static_cast<int>(vals.size()) != n * n) throw ValidationError("expected n*n entries");
    Mat m(n, n);
    auto it = vals.begin();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = *it++;
    return m;
  }

  Mat m_;
};

/// Diagonal of an element of the Cartan subalgebra: traceless real n-vector.
class ChamberVector {
 public:
  ChamberVector() = default;

  ChamberVector(int n, std::span<const double> h) : n_(n) {
    require_dimension(n);
    if (static_cast<int>(h.size()) != n) throw DimensionMismatch("chamber vector length differs from n");
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      h_[i] = h[i];
      sum += h[i];
    }
    if (!(std::abs(sum) <= kTraceTolerance))
      throw ValidationError("chamber vector entries do not sum to zero");
  }

  ChamberVector(int n, std::initializer_list<double> h)
      : ChamberVector(n, std::span<const double>(h.begin(), h.size())) {}

  static ChamberVector zero(int n) {
    require_dimension(n);
    ChamberVector v;
    v.n_ = n;
    return v;
  }

  int n() const { return n_; }
  double operator[](int i) const { return h_[i]; }
  std::span<const double> values() const { return {h_.data(), static_cast<std::size_t>(n_)}; }

  bool in_closed_chamber() const {
    for (int i = 0; i + 1 < n_; ++i)
      if (h_[i] < h_[i + 1] - kChamberTolerance) return false;
    return true;
  }

  ChamberVector scaled(double s) const {
    ChamberVector v = *this;
    for (int i = 0; i < n_; ++i) v.h_[i] *= s;
    return v;
  }

  friend ChamberVector operator+(const ChamberVector& a, const ChamberVector& b) {
    if (a.n_ != b.n_) throw DimensionMismatch("sum of chamber vectors of different dimension");
    ChamberVector v = a;
    for (int i = 0; i < a.n_; ++i) v.h_[i] += b.h_[i];
    return v;
  }

  /// diag(exp h) as a group element.
  MatrixElement exp() const {
    Mat d = Mat::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) d(i, i) = std::exp(h_[i]);
    return MatrixElement(d);
  }

 private:
  int n_ = 0;
  std::array<double, 3> h_{};
};

inline Mat rotation2(double angle) {
  Mat r(2, 2);
  const double c = std::cos(angle), s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

inline Mat rot_z(double a) {
  Mat r = Mat::Identity(3, 3);
  const double c = std::cos(a), s = std::sin(a);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

inline Mat rot_y(double a) {
  Mat r = Mat::Identity(3, 3);
  const double c = std::cos(a), s = std::sin(a);
  r(0, 0) = c;
  r(0, 2) = s;
  r(2, 0) = -s;
  r(2, 2) = c;
  return r;
}

/// ZYZ Euler angles.
inline Mat euler_zyz(double alpha, double beta, double gamma) { return rot_z(alpha) * rot_y(beta) * rot_z(gamma); }

inline double orthogonality_defect(const Mat& k) {
  return (k.transpose() * k - Mat::Identity(k.rows(), k.cols())).norm();
}

// Haar-random rotations and test elements. Used by the property tests and by
// the CLI's seeded matrix generation only.

inline Mat random_rotation(int n, std::mt19937_64& rng) {
  require_dimension(n);
  if (n == 2) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    return rotation2(u(rng));
  }
  std::normal_distribution<double> g;
  double q[4];
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : q) {
      x = g(rng);
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  const double w = q[0] / norm, x = q[1] / norm, y = q[2] / norm, z = q[3] / norm;
  Mat r(3, 3);
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),  //
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),   //
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

/// Traceless diagonal with Euclidean norm uniformly in [0, max_norm], direction random.
inline ChamberVector random_chamber_vector(int n, double max_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 3> h{};
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    h[i] = g(rng);
    mean += h[i];
  }
  mean /= n;
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    h[i] -= mean;
    norm += h[i] * h[i];
  }
  norm = std::sqrt(norm);
  const double r = max_norm * u(rng);
  for (int i = 0; i < n; ++i) h[i] = norm > 0 ? h[i] * r / norm : 0.0;
  // re-center so the trace is zero to rounding
  mean = 0.0;
  for (int i = 0; i < n; ++i) mean += h[i];
  mean /= n;
  for (int i = 0; i < n; ++i) h[i] -= mean;
  return ChamberVector(n, std::span<const double>(h.data(), n));
}

/// k1 * exp(H) * k2 with Haar-random k1, k2 and ||H||_2 <= max_norm.
inline MatrixElement random_element(int n, double max_norm, std::mt19937_64& rng) {
  const Mat k1 = random_rotation(n, rng);
  const ChamberVector h = random_chamber_vector(n, max_norm, rng);
  const Mat k2 = random_rotation(n, rng);
  return MatrixElement(Mat(k1 * h.exp().mat() * k2));
}

}  // namespace ergolab
