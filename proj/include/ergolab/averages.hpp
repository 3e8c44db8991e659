#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/harmonic.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/reduce.hpp"

namespace ergolab {

/// One test-function triple (f, phi, psi) of <M^f phi, psi>.
struct TestTriple {
  BoundaryFunction f;
  BoundaryFunction phi;
  BoundaryFunction psi;
};

struct AverageSpec {
  RootSystemData rs;
  const QuadratureScheme* quad = nullptr;
  BoundaryFunction f, phi, psi;
  std::vector<double> t_grid;
  std::optional<double> theta;

  void validate() const {
    if (quad == nullptr) throw ValidationError("average spec has no quadrature");
    if (t_grid.empty()) throw ValidationError("T_grid must be nonempty");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
      if (!(t_grid[i] < t_grid[i + 1])) throw ValidationError("T_grid must be increasing");
    for (std::size_t j = 0; j < quad->size(); ++j)
      if (std::abs(f(quad->nodes[j])) > f.bound * (1.0 + 1e-12))
        throw ValidationError("f exceeds its declared bound");
  }
};

/// One row of a convergence experiment. A null row stands for an empty ball.
struct AverageReport {
  double T = 0.0;
  std::size_t count = 0;
  Complex estimate{0.0, 0.0};
  Complex target{0.0, 0.0};
  double abs_error = 0.0;
  bool null_row = false;
};

/// Target <phi, 1> <f, psi> of the weak-operator limit.
inline Complex average_target(const QuadratureScheme& q, const TestTriple& t) {
  return inner_product(q, t.phi, functions::one()) * inner_product(q, t.f, t.psi);
}

namespace detail {

/// Distinct functions by name, and for each triple its (phi, psi) slot.
struct BasketLayout {
  std::vector<BoundaryFunction> phis, psis;
  std::vector<std::pair<std::size_t, std::size_t>> slots;

  explicit BasketLayout(std::span<const TestTriple> triples) {
    std::map<std::string, std::size_t> phi_ix, psi_ix;
    for (const auto& t : triples) {
      auto [pi, pnew] = phi_ix.emplace(t.phi.name, phis.size());
      if (pnew) phis.push_back(t.phi);
      auto [si, snew] = psi_ix.emplace(t.psi.name, psis.size());
      if (snew) psis.push_back(t.psi);
      slots.emplace_back(pi->second, si->second);
    }
  }
};

}  // namespace detail

/// (1/|Gamma|) sum_gamma f(b(gamma)) <pi(gamma) phi, psi> / Xi(gamma) for every
/// triple, with one quadrature pass per record shared by all triples.
inline std::vector<Complex> weighted_average_basket(std::span<const LatticePointRecord> records,
                                                    const RootSystemData& rs, const QuadratureScheme& q,
                                                    std::span<const TestTriple> triples, unsigned threads = 0) {
  if (records.empty()) throw EmptyLattice("the lattice ball is empty; the average is undefined");
  const detail::BasketLayout layout(triples);
  const CoefficientBatch batch(rs, q, layout.phis, layout.psis);
  const std::size_t m = triples.size();
  auto sums = ordered_reduce<std::vector<Complex>>(
      records.size(), [m] { return std::vector<Complex>(m); },
      [&](std::vector<Complex>& acc, std::size_t i) {
        const auto& rec = records[i];
        const auto res = batch(rec.element().mat());
        for (std::size_t t = 0; t < m; ++t) {
          const auto [a, b] = layout.slots[t];
          acc[t] += triples[t].f(rec.b_plus) * res.coef[a * batch.num_psi() + b] / rec.xi;
        }
      },
      [](std::vector<Complex>& a, const std::vector<Complex>& b) {
        for (std::size_t t = 0; t < a.size(); ++t) a[t] += b[t];
      },
      threads);
  for (auto& s : sums) s /= static_cast<double>(records.size());
  return sums;
}

inline Complex weighted_average(std::span<const LatticePointRecord> records, const AverageSpec& spec,
                                unsigned threads = 0) {
  const TestTriple t{spec.f, spec.phi, spec.psi};
  return weighted_average_basket(records, spec.rs, *spec.quad, std::span<const TestTriple>(&t, 1), threads)[0];
}

/// Convergence rows over t_grid for every triple. `records` is the
/// enumeration of the largest ball; smaller balls are its restrictions.
/// result[t][k] is the row of triple t at t_grid[k].
inline std::vector<std::vector<AverageReport>> convergence_basket(std::span<const LatticePointRecord> records,
                                                                  const RootSystemData& rs,
                                                                  const QuadratureScheme& q,
                                                                  std::span<const TestTriple> triples,
                                                                  std::span<const double> t_grid,
                                                                  std::optional<double> theta = std::nullopt,
                                                                  unsigned threads = 0) {
  std::vector<Complex> targets;
  for (const auto& t : triples) targets.push_back(average_target(q, t));
  std::vector<std::vector<AverageReport>> out(triples.size());
  for (double T : t_grid) {
    std::vector<LatticePointRecord> ball;
    for (const auto& r : records)
      if (r.length < T && (!theta || r.angle < *theta)) ball.push_back(r);
    std::vector<Complex> est;
    if (!ball.empty()) est = weighted_average_basket(ball, rs, q, triples, threads);
    for (std::size_t t = 0; t < triples.size(); ++t) {
      AverageReport row;
      row.T = T;
      row.count = ball.size();
      row.target = targets[t];
      if (ball.empty()) {
        row.null_row = true;
      } else {
        row.estimate = est[t];
        row.abs_error = std::abs(row.estimate - row.target);
      }
      out[t].push_back(row);
    }
  }
  return out;
}

inline std::vector<AverageReport> convergence_suite(const AverageSpec& spec,
                                                    std::span<const LatticePointRecord> records,
                                                    unsigned threads = 0) {
  spec.validate();
  const TestTriple t{spec.f, spec.phi, spec.psi};
  return convergence_basket(records, spec.rs, *spec.quad, std::span<const TestTriple>(&t, 1), spec.t_grid,
                            spec.theta, threads)[0];
}

/// (1/|Gamma|) sum f(b(gamma)).
inline Complex equidistribution_average(std::span<const LatticePointRecord> records, const BoundaryFunction& f,
                                        unsigned threads = 0) {
  if (records.empty()) throw EmptyLattice("the lattice ball is empty");
  const Complex s = ordered_sum<Complex>(records.size(), [&](std::size_t i) { return f(records[i].b_plus); }, threads);
  return s / static_cast<double>(records.size());
}

/// Fraction of records with b(gamma) in U and b(gamma^-1) in V.
inline double two_sided_fraction(std::span<const LatticePointRecord> records, const BoundaryRegion& u,
                                 const BoundaryRegion& v) {
  if (records.empty()) throw EmptyLattice("the lattice ball is empty");
  std::size_t hits = 0;
  for (const auto& r : records)
    if (u.contains(r.b_plus) && v.contains(r.b_minus)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

struct MarkovRow {
  double sup = 0.0;
  /// Row value (1/|Gamma|) sum pi(gamma)1(x_j) / Xi(gamma) at each quadrature node.
  std::vector<double> table;
  /// sum_j w_j table[j]
  double mean = 0.0;
};

inline MarkovRow lattice_markov_row(std::span<const LatticePointRecord> records, const RootSystemData& rs,
                                    const QuadratureScheme& q, unsigned threads = 0) {
  if (records.empty()) throw EmptyLattice("the lattice ball is empty");
  if (rs.n != q.n) throw DimensionMismatch("root data and quadrature dimensions differ");
  const std::size_t m = q.size();
  auto row = ordered_reduce<std::vector<double>>(
      records.size(), [m] { return std::vector<double>(m, 0.0); },
      [&](std::vector<double>& acc, std::size_t i) {
        const auto& rec = records[i];
        const double inv_xi = 1.0 / rec.xi;
        detail::for_each_transported(q, rec.element().inverse().mat(), [&](std::size_t j, const Transported& t) {
          acc[j] += std::exp(-t.rho_hi) * inv_xi;
        });
      },
      [](std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
      },
      threads);
  MarkovRow out;
  const double n = static_cast<double>(records.size());
  for (std::size_t j = 0; j < m; ++j) {
    row[j] /= n;
    out.sup = std::max(out.sup, row[j]);
    out.mean += q.weights[j] * row[j];
  }
  out.table = std::move(row);
  return out;
}

/// Default K-rule size for haar_markov_check; the integrand is smooth, so the
/// error falls geometrically as this doubles.
inline constexpr int kHaarMarkovNodes = 128;

/// (1/vol G_T) integral over G_T of pi(g)1(x) / Xi(g) dg at each x, by the
/// Cartan integration formula. The K-integral uses `quad_k`; Xi(exp H) uses
/// the independent rule `xi_quad`.
inline std::vector<double> haar_markov_check(const RootSystemData& rs, const QuadratureScheme& quad_k, double T,
                                             std::span<const BoundaryPoint> x_nodes,
                                             const QuadratureScheme& xi_quad, int radial_order = 32) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  if (T > 4.0) throw ResourceLimit("haar_markov_check is limited to T <= 4");
  if (quad_k.n != rs.n || xi_quad.n != rs.n) throw DimensionMismatch("quadrature dimension differs from n");
  const auto [gx, gw] = gauss_legendre(radial_order);
  const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * T)));

  // Chamber sample points H with measure weights J(H) dH.
  struct Sample {
    ChamberVector h;
    double weight;
  };
  std::vector<Sample> samples;
  auto add_radial = [&](auto&& direction_weights) {
    const double step = T / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double r = p * step + 0.5 * step * (gx[i] + 1.0);
        direction_weights(r, 0.5 * step * gw[i]);
      }
  };
  if (rs.n == 2) {
    add_radial([&](double r, double w) {
      const ChamberVector h = rs.h_max.scaled(r);
      samples.push_back({h, w * cartan_jacobian(rs, h)});
    });
  } else {
    const double c = rs.inner_scale;
    const double half = std::numbers::pi / 6;
    const std::array<double, 3> u1{1 / std::sqrt(2.0 * c), 0.0, -1 / std::sqrt(2.0 * c)};
    const std::array<double, 3> u2{1 / std::sqrt(6.0 * c), -2 / std::sqrt(6.0 * c), 1 / std::sqrt(6.0 * c)};
    const auto [ax, aw] = gauss_legendre(radial_order);
    add_radial([&](double r, double w) {
      for (std::size_t i = 0; i < ax.size(); ++i) {
        const double phi = half * ax[i];
        std::array<double, 3> v{};
        for (int k = 0; k < 3; ++k) v[k] = r * (std::cos(phi) * u1[k] + std::sin(phi) * u2[k]);
        const double mean = (v[0] + v[1] + v[2]) / 3.0;
        for (double& e : v) e -= mean;
        const ChamberVector h(3, std::span<const double>(v.data(), 3));
        samples.push_back({h, w * half * aw[i] * r * cartan_jacobian(rs, h)});
      }
    });
  }

  std::vector<double> xi(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    xi[s] = harish_chandra(rs, xi_quad, samples[s].h.exp());
  }
  const double vol_ref = volume_ball(rs, T);

  std::vector<double> out;
  for (const auto& x : x_nodes) {
    const Mat xl = x.frame();
    double total = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      // pi(k a l) 1 (x) = pi(a) 1 (k^-1 x); the l-integral is trivial since c(l, .) = 1.
      const Mat ainv = samples[s].h.scaled(-1.0).exp().mat();
      double k_int = 0.0;
      for (std::size_t j = 0; j < quad_k.size(); ++j) {
        const Transported t = detail::transport(ainv, Mat(quad_k.lifts[j].transpose() * xl));
        k_int += quad_k.weights[j] * std::exp(-t.rho_hi);
      }
      total += samples[s].weight * k_int / xi[s];
    }
    out.push_back(total / vol_ref);
  }
  return out;
}

/// <M_B phi, psi> against the count-weighted combination of annuli averages.
/// Returns the absolute deviation of the two sides.
inline double annuli_identity_check(std::span<const LatticePointRecord> records, std::span<const double> t_grid,
                                    const RootSystemData& rs, const QuadratureScheme& q, const TestTriple& triple,
                                    unsigned threads = 0) {
  const auto buckets = annuli_partition(records, t_grid);
  std::vector<LatticePointRecord> ball;
  for (const auto& b : buckets)
    for (std::size_t i : b) ball.push_back(records[i]);
  if (ball.empty()) throw EmptyLattice("the lattice ball is empty");
  const std::span<const TestTriple> one(&triple, 1);
  const Complex lhs = weighted_average_basket(ball, rs, q, one, threads)[0];
  Complex rhs(0.0, 0.0);
  for (const auto& b : buckets) {
    if (b.empty()) continue;
    std::vector<LatticePointRecord> cell;
    for (std::size_t i : b) cell.push_back(records[i]);
    const double share = static_cast<double>(cell.size()) / static_cast<double>(ball.size());
    rhs += share * weighted_average_basket(cell, rs, q, one, threads)[0];
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Koopman baseline: circle rotation, Xi = 1
// ---------------------------------------------------------------------------

/// Rotation x -> x + alpha on R/Z, realized on K/M (n = 2) as theta -> theta + pi alpha.
struct KoopmanSystem {
  double alpha = 0.0;
  int grid = 256;
  std::vector<std::size_t> sizes;
};

struct KoopmanRow {
  std::size_t n = 0;
  Complex estimate{0.0, 0.0};
  Complex target{0.0, 0.0};
};

/// Birkhoff averages (1/n) sum_{k<n} <U^k phi, psi> with U phi(x) = phi(x + alpha).
inline std::vector<KoopmanRow> koopman_birkhoff(const KoopmanSystem& sys, const BoundaryFunction& phi,
                                                const BoundaryFunction& psi) {
  if (sys.grid < 1) throw ValidationError("grid must be positive");
  const QuadratureScheme q = circle_rule(sys.grid);
  std::vector<std::size_t> sizes = sys.sizes;
  std::sort(sizes.begin(), sizes.end());
  const Complex target = inner_product(q, phi, functions::one()) * inner_product(q, functions::one(), psi);
  std::vector<Complex> psi_conj(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) psi_conj[j] = std::conj(psi(q.nodes[j]));
  std::vector<KoopmanRow> out;
  Complex running(0.0, 0.0);
  std::size_t k = 0;
  for (std::size_t n : sizes) {
    for (; k < n; ++k) {
      const double shift = std::numbers::pi * std::fmod(sys.alpha * static_cast<double>(k), 1.0);
      Complex c(0.0, 0.0);
      for (std::size_t j = 0; j < q.size(); ++j)
        c += q.weights[j] * phi(BoundaryPoint::from_angle(q.nodes[j].angle() + shift)) * psi_conj[j];
      running += c;
    }
    out.push_back({n, n ? running / static_cast<double>(n) : Complex(0.0, 0.0), target});
  }
  return out;
}

}  // namespace ergolab
