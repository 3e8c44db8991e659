#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "ergolab/boundary.hpp"
#include "ergolab/quadrature.hpp"

namespace ergolab {

// Quadrature of the quasi-regular representation. Every integral over K/M
// below is the fixed-order weighted sum over the nodes of a QuadratureScheme,
// so identical inputs give bitwise identical outputs.

namespace detail {

inline void check_dims(const RootSystemData& rs, const QuadratureScheme& q, int n) {
  if (rs.n != q.n || q.n != n) throw DimensionMismatch("root data, quadrature and element dimensions differ");
}

/// Calls fn(j, Transported) for kappa(h k_j) over all nodes in order.
template <class F>
void for_each_transported(const QuadratureScheme& q, const Mat& h, F&& fn) {
  const std::size_t count = q.size();
  if (q.n == 2) {
    const double h00 = h(0, 0), h01 = h(0, 1), h10 = h(1, 0), h11 = h(1, 1);
    const double det = h00 * h11 - h01 * h10;
    for (std::size_t j = 0; j < count; ++j) {
      const Mat& k = q.lifts[j];
      fn(j, transport2(h00, h01, h10, h11, det, k(0, 0), k(1, 0)));
    }
    return;
  }
  for (std::size_t j = 0; j < count; ++j) fn(j, transport(h, q.lifts[j]));
}

}  // namespace detail

/// <phi, psi> = sum_j w_j phi(b_j) conj(psi(b_j)).
inline Complex inner_product(const QuadratureScheme& q, const BoundaryFunction& phi, const BoundaryFunction& psi) {
  Complex s(0.0, 0.0);
  for (std::size_t j = 0; j < q.size(); ++j) s += q.weights[j] * phi(q.nodes[j]) * std::conj(psi(q.nodes[j]));
  return s;
}

/// Xi(g) = integral over K of exp(-rho(H_I(g^-1 k))) dk.
inline double harish_chandra(const RootSystemData& rs, const QuadratureScheme& q, const MatrixElement& g) {
  detail::check_dims(rs, q, g.n());
  double s = 0.0;
  detail::for_each_transported(q, g.inverse().mat(),
                               [&](std::size_t j, const Transported& t) { s += q.weights[j] * std::exp(-t.rho_hi); });
  return s;
}

/// <pi(g) phi, psi>.
inline Complex matrix_coefficient(const RootSystemData& rs, const QuadratureScheme& q, const MatrixElement& g,
                                  const BoundaryFunction& phi, const BoundaryFunction& psi) {
  detail::check_dims(rs, q, g.n());
  Complex s(0.0, 0.0);
  detail::for_each_transported(q, g.inverse().mat(), [&](std::size_t j, const Transported& t) {
    s += q.weights[j] * std::exp(-t.rho_hi) * phi(t.point) * std::conj(psi(q.nodes[j]));
  });
  return s;
}

/// All matrix coefficients <pi(g) phi_a, psi_b> and Xi(g) in one pass over
/// the nodes. conj(psi_b) is tabulated once at construction.
class CoefficientBatch {
 public:
  struct Result {
    double xi = 0.0;
    /// coef[a * num_psi + b] = <pi(g) phi_a, psi_b>
    std::vector<Complex> coef;
  };

  CoefficientBatch(const RootSystemData& rs, const QuadratureScheme& q, std::vector<BoundaryFunction> phis,
                   std::vector<BoundaryFunction> psis)
      : rs_(rs), q_(q), phis_(std::move(phis)), num_psi_(psis.size()) {
    psi_conj_.resize(num_psi_ * q.size());
    for (std::size_t b = 0; b < num_psi_; ++b)
      for (std::size_t j = 0; j < q.size(); ++j) psi_conj_[b * q.size() + j] = std::conj(psis[b](q.nodes[j]));
  }

  std::size_t num_phi() const { return phis_.size(); }
  std::size_t num_psi() const { return num_psi_; }

  Result operator()(const Mat& g) const {
    detail::check_dims(rs_, q_, static_cast<int>(g.rows()));
    Result r;
    r.coef.assign(phis_.size() * num_psi_, Complex(0.0, 0.0));
    const Mat ginv = g.inverse();
    const std::size_t m = q_.size();
    std::vector<Complex> vals(phis_.size());
    detail::for_each_transported(q_, ginv, [&](std::size_t j, const Transported& t) {
      const double e = q_.weights[j] * std::exp(-t.rho_hi);
      r.xi += e;
      for (std::size_t a = 0; a < phis_.size(); ++a) vals[a] = e * phis_[a](t.point);
      for (std::size_t a = 0; a < phis_.size(); ++a)
        for (std::size_t b = 0; b < num_psi_; ++b) r.coef[a * num_psi_ + b] += vals[a] * psi_conj_[b * m + j];
    });
    return r;
  }

 private:
  RootSystemData rs_;
  const QuadratureScheme& q_;
  std::vector<BoundaryFunction> phis_;
  std::size_t num_psi_;
  std::vector<Complex> psi_conj_;
};

/// Normalized square root of the Poisson kernel: <pi(g) 1, conj(phi)> / Xi(g).
inline Complex poisson_p0(const RootSystemData& rs, const QuadratureScheme& q, const BoundaryFunction& phi,
                          const MatrixElement& g) {
  detail::check_dims(rs, q, g.n());
  double xi = 0.0;
  Complex s(0.0, 0.0);
  detail::for_each_transported(q, g.inverse().mat(), [&](std::size_t j, const Transported& t) {
    const double e = q.weights[j] * std::exp(-t.rho_hi);
    xi += e;
    s += e * phi(q.nodes[j]);
  });
  return s / xi;
}

/// P0 of the indicator {d(., eM) >= r} along exp(s H_max), for each s.
inline std::vector<std::pair<double, double>> peak_decay_profile(const RootSystemData& rs, const QuadratureScheme& q,
                                                                 double r, std::span<const double> s_grid) {
  if (!(r > 0.0)) throw ValidationError("r must be positive");
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i)
    if (!(s_grid[i] < s_grid[i + 1])) throw ValidationError("s_grid must be increasing");
  const BoundaryPoint origin = base_point(rs.n);
  const BoundaryFunction far{"far", [origin, r](const BoundaryPoint& b) {
                               return Complex(boundary_distance(b, origin) >= r ? 1.0 : 0.0, 0.0);
                             },
                             std::nullopt};
  std::vector<std::pair<double, double>> out;
  for (double s : s_grid) out.emplace_back(s, poisson_p0(rs, q, far, barycenter_flow(rs, s)).real());
  return out;
}

/// max |log Xi(v g) - log Xi(g)| over the given perturbations v and elements g.
inline double stability_constant(const RootSystemData& rs, const QuadratureScheme& q,
                                 std::span<const MatrixElement> vs, std::span<const MatrixElement> gs) {
  double c0 = 0.0;
  for (const auto& g : gs) {
    const double base = std::log(harish_chandra(rs, q, g));
    for (const auto& v : vs) c0 = std::max(c0, std::abs(std::log(harish_chandra(rs, q, v * g)) - base));
  }
  return c0;
}

}  // namespace ergolab
