#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ergolab/boundary_point.hpp"

namespace ergolab {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_m).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  if (m < 1) throw ValidationError("Gauss-Legendre order must be positive");
  std::vector<double> x(m), w(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= m; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = m * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// A deterministic rule for the K-invariant probability measure on K/M.
/// Each node carries the lift in K used to evaluate Iwasawa projections.
struct QuadratureScheme {
  int n = 0;
  std::vector<BoundaryPoint> nodes;
  std::vector<Mat> lifts;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n = 2: theta_j = j*pi/N with weight 1/N.
inline QuadratureScheme circle_rule(int nodes) {
  if (nodes < 1) throw ValidationError("quad: node count must be positive");
  QuadratureScheme q;
  q.n = 2;
  q.nodes.reserve(nodes);
  q.lifts.reserve(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double theta = std::numbers::pi * j / nodes;
    const Mat k = rotation2(theta);
    q.lifts.push_back(k);
    q.nodes.push_back(BoundaryPoint::from_frame(k));
    q.weights.push_back(1.0 / nodes);
  }
  return q;
}

/// n = 3: tensor ZYZ Euler rule, uniform in alpha and gamma, Gauss-Legendre
/// in cos(beta); realizes normalized Haar measure on SO(3).
inline QuadratureScheme euler_rule(int n_alpha, int n_beta, int n_gamma) {
  if (n_alpha < 1 || n_beta < 1 || n_gamma < 1) throw ValidationError("quad: node count must be positive");
  const auto [x, w] = gauss_legendre(n_beta);
  QuadratureScheme q;
  q.n = 3;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int a = 0; a < n_alpha; ++a)
    for (int b = 0; b < n_beta; ++b)
      for (int c = 0; c < n_gamma; ++c) {
        const Mat k = euler_zyz(two_pi * a / n_alpha, std::acos(x[b]), two_pi * c / n_gamma);
        q.lifts.push_back(k);
        q.nodes.push_back(BoundaryPoint::from_frame(k));
        q.weights.push_back(w[b] / (2.0 * n_alpha * n_gamma));
      }
  return q;
}

inline constexpr int kDefaultCircleNodes = 1024;
inline constexpr int kDefaultEulerNodes = 16;

/// Default rule for dimension n; `resolution` is the node count for n = 2 and
/// the per-axis count for n = 3.
inline QuadratureScheme default_quadrature(int n, int resolution = 0) {
  require_dimension(n);
  if (n == 2) return circle_rule(resolution > 0 ? resolution : kDefaultCircleNodes);
  const int m = resolution > 0 ? resolution : kDefaultEulerNodes;
  return euler_rule(m, m, m);
}

}  // namespace ergolab
