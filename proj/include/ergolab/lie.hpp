#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "ergolab/linalg.hpp"

namespace ergolab {

// ---------------------------------------------------------------------------
// Decompositions
// ---------------------------------------------------------------------------

/// g = k * diag(exp(hI)) * nfac with k in SO(n), nfac unit upper triangular.
struct IwasawaFactors {
  Mat k;
  ChamberVector hI;
  Mat nfac;
};

/// g = k1 * diag(exp(H)) * k2 with k1, k2 in SO(n) and H non-increasing.
struct CartanFactors {
  Mat k1;
  ChamberVector H;
  Mat k2;
  bool regular = false;
};

inline constexpr double kRegularityTolerance = 1e-9;

namespace detail {

inline ChamberVector centered(int n, const std::array<double, 3>& raw) {
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += raw[i];
  mean /= n;
  std::array<double, 3> h{};
  for (int i = 0; i < n; ++i) h[i] = raw[i] - mean;
  return ChamberVector(n, std::span<const double>(h.data(), n));
}


/// Gram-Schmidt core shared by iwasawa() and the quadrature kernels.
/// Returns false on a rank-deficient leading minor.
inline bool orthonormalize(const Mat& a, Mat& q, Mat& r) {
  const int n = static_cast<int>(a.rows());
  q.setZero(n, n);
  r.setZero(n, n);
  const double scale = a.norm();
  for (int j = 0; j < n; ++j) {
    Vec v = a.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const double p = q.col(i).dot(v);
        r(i, j) += p;
        v -= p * q.col(i);
      }
    }
    const double len = v.norm();
    if (!(len > 1e-14 * scale)) return false;
    r(j, j) = len;
    q.col(j) = v / len;
  }
  return true;
}

}  // namespace detail

/// Column orthonormalization with a positive upper-triangular factor
/// (modified Gram-Schmidt with one reorthogonalization pass).
inline IwasawaFactors iwasawa(const MatrixElement& g) {
  const int n = g.n();
  Mat q, r;
  if (!detail::orthonormalize(g.mat(), q, r))
    throw DecompositionFailure("rank-deficient leading minor in Iwasawa orthonormalization");
  std::array<double, 3> logs{};
  for (int i = 0; i < n; ++i) logs[i] = std::log(r(i, i));
  Mat nfac = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) nfac(i, j) = r(i, j) / r(i, i);
  return {q, detail::centered(n, logs), nfac};
}

/// KA+K via singular values sorted descending; determinant signs of the
/// orthogonal factors repaired by flipping paired last columns.
inline CartanFactors cartan(const MatrixElement& g) {
  const int n = g.n();
  Eigen::JacobiSVD<Mat> svd(g.mat(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  Mat v = svd.matrixV();
  const Vec s = svd.singularValues();
  if (u.determinant() < 0) {
    u.col(n - 1) *= -1.0;
    v.col(n - 1) *= -1.0;
  }
  std::array<double, 3> logs{};
  for (int i = 0; i < n; ++i) logs[i] = std::log(s(i));
  bool regular = true;
  for (int i = 0; i + 1 < n; ++i)
    if (!(s(i) - s(i + 1) > kRegularityTolerance * s(i))) regular = false;
  return {u, detail::centered(n, logs), v.transpose(), regular};
}

// ---------------------------------------------------------------------------
// Root system of sl(n)
// ---------------------------------------------------------------------------

struct RootSystemData {
  int n = 0;
  /// (i, j) with i < j: the root H -> h_i - h_j, multiplicity one.
  std::vector<std::pair<int, int>> positive_roots;
  std::array<double, 3> rho{};
  double inner_scale = 1.0;
  ChamberVector h_max;
  double delta = 0.0;
  /// Signed permutation in SO(n) with Ad(m0) a+ = -a+.
  Mat m0;
};

inline double default_inner_scale(int n) { return n == 2 ? 2.0 : 1.0; }

inline RootSystemData root_data(int n, std::optional<double> inner_scale = std::nullopt) {
  require_dimension(n);
  const double c = inner_scale.value_or(default_inner_scale(n));
  if (!(c > 0.0)) throw ValidationError("inner_scale must be positive");
  RootSystemData rs;
  rs.n = n;
  rs.inner_scale = c;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      rs.positive_roots.emplace_back(i, j);
      rs.rho[i] += 0.5;
      rs.rho[j] -= 0.5;
    }
  double sq = 0.0;
  for (int i = 0; i < n; ++i) sq += rs.rho[i] * rs.rho[i];
  // The trace-form dual of rho is rho itself; normalize under c * tr.
  const double norm = std::sqrt(c * sq);
  std::array<double, 3> hm{};
  for (int i = 0; i < n; ++i) hm[i] = rs.rho[i] / norm;
  rs.h_max = ChamberVector(n, std::span<const double>(hm.data(), n));
  rs.delta = 2.0 * sq / norm;
  // Reversal permutation with the sign of the middle entry chosen for det +1.
  rs.m0 = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) rs.m0(i, n - 1 - i) = 1.0;
  if (rs.m0.determinant() < 0) rs.m0(n / 2, n - 1 - n / 2) = -1.0;
  return rs;
}

inline double rho_of(const RootSystemData& rs, const ChamberVector& h) {
  double s = 0.0;
  for (int i = 0; i < rs.n; ++i) s += rs.rho[i] * h[i];
  return s;
}

inline double inner(const RootSystemData& rs, const ChamberVector& a, const ChamberVector& b) {
  double s = 0.0;
  for (int i = 0; i < rs.n; ++i) s += a[i] * b[i];
  return rs.inner_scale * s;
}

inline double length_of(const RootSystemData& rs, const ChamberVector& h) { return std::sqrt(inner(rs, h, h)); }

/// Angle between H and the barycenter, in [0, pi].
inline double chamber_angle(const RootSystemData& rs, const ChamberVector& h) {
  const double len = length_of(rs, h);
  if (len == 0.0) throw ZeroVector("chamber_angle of the zero vector");
  // rank one: a is a line through H_max
  if (rs.n == 2) return h[0] > h[1] ? 0.0 : std::numbers::pi;
  // atan2 of the perpendicular and parallel parts; acos loses half the digits near 0
  const double par = inner(rs, h, rs.h_max);
  double perp2 = 0.0;
  for (int i = 0; i < rs.n; ++i) {
    const double d = h[i] - par * rs.h_max[i];
    perp2 += d * d;
  }
  return std::atan2(std::sqrt(rs.inner_scale * perp2), par);
}

/// prod over positive roots of sinh(alpha(H)); zero on the walls.
inline double cartan_jacobian(const RootSystemData& rs, const ChamberVector& h) {
  double j = 1.0;
  for (auto [a, b] : rs.positive_roots) {
    const double x = h[a] - h[b];
    if (!(x > 0.0)) return 0.0;
    j *= std::sinh(x);
  }
  return j;
}

/// iota(H) = -Ad(m0) H.
inline ChamberVector opposition_apply(const RootSystemData& rs, const ChamberVector& h) {
  const int n = rs.n;
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = h[i];
  const Mat conj = rs.m0 * d * rs.m0.transpose();
  std::array<double, 3> out{};
  for (int i = 0; i < n; ++i) out[i] = -conj(i, i);
  return ChamberVector(n, std::span<const double>(out.data(), n));
}

/// Length L(g) = ||H(g)|| of the Cartan projection.
inline double length_of(const RootSystemData& rs, const MatrixElement& g) { return length_of(rs, cartan(g).H); }

/// exp(s * H_max).
inline MatrixElement barycenter_flow(const RootSystemData& rs, double s) { return rs.h_max.scaled(s).exp(); }

}  // namespace ergolab
