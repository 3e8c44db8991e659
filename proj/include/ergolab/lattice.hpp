#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ergolab/harmonic.hpp"
#include "ergolab/quadrature.hpp"
#include "ergolab/reduce.hpp"

namespace ergolab {

using IntMatrix = std::array<std::int64_t, 9>;  // row-major, n*n entries used

enum class LatticeKind { full, congruence };

/// Which lattice, and the ball radius (plus optional cone half-angle).
struct LatticeSpec {
  int n = 2;
  LatticeKind kind = LatticeKind::full;
  int q = 1;  // level of the principal congruence subgroup (n = 2 only)
  double T = 1.0;
  std::optional<double> theta;

  void validate() const {
    require_dimension(n);
    if (!(T > 0.0)) throw ValidationError("T must be positive");
    if (q < 1) throw ValidationError("q must be >= 1");
    if (kind == LatticeKind::congruence && n != 2)
      throw ValidationError("congruence subgroups are only supported for n = 2");
    if (theta && !(*theta > 0.0)) throw ValidationError("theta must be positive");
  }
};

struct EnumerationOptions {
  double max_T2 = 14.0;
  double max_T3 = 1.8;
  std::size_t max_records = 5'000'000;
  unsigned threads = 0;
};

/// A lattice element inside a Cartan ball together with its Cartan data.
struct LatticePointRecord {
  int n = 2;
  IntMatrix gamma{};
  ChamberVector H;
  double length = 0.0;
  double angle = 0.0;
  BoundaryPoint b_plus;
  BoundaryPoint b_minus;
  double xi = 0.0;

  std::int64_t entry(int i, int j) const { return gamma[i * n + j]; }

  MatrixElement element() const {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(entry(i, j));
    return MatrixElement(m);
  }
};

struct Enumeration {
  std::vector<LatticePointRecord> records;
  /// Elements of the ball with a repeated singular value (no boundary data).
  std::size_t non_regular = 0;
};

inline IntMatrix integer_inverse(int n, const IntMatrix& g) {
  IntMatrix inv{};
  if (n == 2) {
    inv[0] = g[3];
    inv[1] = -g[1];
    inv[2] = -g[2];
    inv[3] = g[0];
    return inv;
  }
  auto e = [&](int i, int j) { return g[i * 3 + j]; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i * 3 + j] = e(r0, c0) * e(r1, c1) - e(r0, c1) * e(r1, c0);
    }
  return inv;
}

/// Builds the record of a unimodular integer matrix. Returns nullopt when the
/// Cartan projection is not regular.
inline std::optional<LatticePointRecord> make_record(const RootSystemData& rs, const QuadratureScheme& quad,
                                                     const IntMatrix& gamma) {
  LatticePointRecord rec;
  rec.n = rs.n;
  rec.gamma = gamma;
  const MatrixElement g = rec.element();
  const CartanFactors cf = cartan(g);
  if (!cf.regular) return std::nullopt;
  rec.H = cf.H;
  rec.length = length_of(rs, cf.H);
  rec.angle = chamber_angle(rs, cf.H);
  rec.b_plus = boundary_map(cf);
  rec.b_minus = boundary_map_inverse(rs, cf);
  rec.xi = harish_chandra(rs, quad, g);
  return rec;
}

namespace detail {

inline std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return a >= 0 ? a : -a;
  }
  std::int64_t x1, y1;
  const std::int64_t d = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return d;
}

inline bool in_congruence(const LatticeSpec& spec, const IntMatrix& g) {
  if (spec.kind != LatticeKind::congruence || spec.q == 1) return true;
  const std::int64_t q = spec.q;
  auto mod = [q](std::int64_t v) { return ((v % q) + q) % q; };
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j)
      if (mod(g[i * spec.n + j]) != (i == j ? 1 % q : 0)) return false;
  return true;
}

/// Strict open-ball test on an integer squared norm against 2 cosh T.
inline bool norm_in_ball(std::int64_t norm2, double bound) {
  return norm2 > 2 && static_cast<double>(norm2) < bound - 1e-12 * bound;
}

inline Enumeration build_records(const RootSystemData& rs, const QuadratureScheme& quad, double T,
                                 std::vector<IntMatrix> candidates, unsigned threads) {
  std::sort(candidates.begin(), candidates.end());
  std::vector<std::optional<LatticePointRecord>> slots(candidates.size());
  parallel_for(
      candidates.size(), [&](std::size_t i) { slots[i] = make_record(rs, quad, candidates[i]); }, threads);
  Enumeration out;
  out.records.reserve(candidates.size());
  for (auto& s : slots) {
    if (!s) {
      ++out.non_regular;
      continue;
    }
    if (s->length > 0.0 && s->length < T) out.records.push_back(std::move(*s));
  }
  return out;
}

}  // namespace detail

/// Integer matrices (a b; c d) of SL(2,Z) (or Gamma(q)) with
/// 2 < a^2+b^2+c^2+d^2 < 2 cosh T, i.e. 0 < L(gamma) < T under the default
/// normalization, sorted lexicographically.
inline std::vector<IntMatrix> sl2z_ball(const LatticeSpec& spec) {
  const double bound = 2.0 * std::cosh(spec.T);
  std::vector<IntMatrix> out;
  const auto amax = static_cast<std::int64_t>(std::floor(std::sqrt(bound)));
  for (std::int64_t a = -amax; a <= amax; ++a)
    for (std::int64_t b = -amax; b <= amax; ++b) {
      const std::int64_t s = a * a + b * b;
      if (s == 0 || static_cast<double>(s) >= bound) continue;
      std::int64_t x, y;
      if (detail::ext_gcd(a, b, x, y) != 1) continue;
      // a*x + b*y = 1, so (c0, d0) = (-y, x) has a*d0 - b*c0 = 1; all
      // solutions are (c0 + k a, d0 + k b).
      const std::int64_t c0 = -y, d0 = x;
      const double B = static_cast<double>(a * c0 + b * d0);
      const double C = static_cast<double>(c0 * c0 + d0 * d0 + s) - bound;
      const double S = static_cast<double>(s);
      const double disc = B * B - S * C;
      if (disc < 0) continue;
      const double root = std::sqrt(disc);
      const auto klo = static_cast<std::int64_t>(std::floor((-B - root) / S)) - 1;
      const auto khi = static_cast<std::int64_t>(std::ceil((-B + root) / S)) + 1;
      for (std::int64_t k = klo; k <= khi; ++k) {
        const std::int64_t c = c0 + k * a, d = d0 + k * b;
        if (!detail::norm_in_ball(s + c * c + d * d, bound)) continue;
        IntMatrix g{a, b, c, d};
        if (detail::in_congruence(spec, g)) out.push_back(g);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline Enumeration enumerate_sl2z(const LatticeSpec& spec, const RootSystemData& rs, const QuadratureScheme& quad,
                                  const EnumerationOptions& opt = {}) {
  spec.validate();
  if (spec.n != 2 || rs.n != 2) throw DimensionMismatch("enumerate_sl2z requires n = 2");
  if (spec.T > opt.max_T2)
    throw ResourceLimit("T=" + std::to_string(spec.T) + " exceeds the n=2 guard " + std::to_string(opt.max_T2));
  // |Gamma_T| ~ 6 * 2cosh(T) for SL(2,Z); subgroups only lower it
  const double predicted = 12.0 * std::cosh(spec.T * std::sqrt(2.0 / rs.inner_scale));
  if (predicted > static_cast<double>(opt.max_records))
    throw ResourceLimit("predicted " + std::to_string(static_cast<long long>(predicted)) +
                        " records exceeds the cap " + std::to_string(opt.max_records));
  // Lengths use the configured inner scale; with the default scale the norm
  // criterion is exact and the length filter in build_records is a no-op.
  LatticeSpec wide = spec;
  wide.T = spec.T * std::sqrt(2.0 / rs.inner_scale);
  return detail::build_records(rs, quad, spec.T, sl2z_ball(wide), opt.threads);
}

namespace detail {

/// Largest sum of exp(2 h_i) over traceless h with c * |h|^2 <= T^2 (n = 3),
/// padded so it bounds the Frobenius norm^2 of every element of the ball.
inline double sl3_frobenius_bound(double T, double c) {
  const double r = T / std::sqrt(c);
  double best = 0.0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / steps;
    const double x = r * std::cos(phi), y = r * std::sin(phi);
    const double h0 = x / std::sqrt(2.0) + y / std::sqrt(6.0);
    const double h1 = -2.0 * y / std::sqrt(6.0);
    const double h2 = -x / std::sqrt(2.0) + y / std::sqrt(6.0);
    best = std::max(best, std::exp(2 * h0) + std::exp(2 * h1) + std::exp(2 * h2));
  }
  return best * (1.0 + 1e-3) + 1e-9;
}

}  // namespace detail

/// Every unimodular 3x3 integer matrix in the Cartan ball of radius T, by
/// exhaustive search over rows with norm pruning.
inline std::vector<IntMatrix> sl3z_ball_candidates(double T, double inner_scale) {
  const double h1max = T * std::sqrt(2.0 / (3.0 * inner_scale));
  const double sigma_max = std::exp(h1max);
  const double row_bound = sigma_max * sigma_max * (1.0 + 1e-9);
  const double frob_bound = detail::sl3_frobenius_bound(T, inner_scale);
  const auto emax = static_cast<std::int64_t>(std::floor(sigma_max));

  std::vector<std::array<std::int64_t, 3>> rows;
  for (std::int64_t x = -emax; x <= emax; ++x)
    for (std::int64_t y = -emax; y <= emax; ++y)
      for (std::int64_t z = -emax; z <= emax; ++z) {
        const std::int64_t nn = x * x + y * y + z * z;
        if (nn > 0 && static_cast<double>(nn) <= row_bound) rows.push_back({x, y, z});
      }
  auto norm2 = [](const std::array<std::int64_t, 3>& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; };
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& u, const auto& v) { return norm2(u) < norm2(v); });

  std::vector<IntMatrix> out;
  for (const auto& r1 : rows) {
    const std::int64_t n1 = norm2(r1);
    for (const auto& r2 : rows) {
      const std::int64_t n2 = norm2(r2);
      if (static_cast<double>(n1 + n2 + 1) > frob_bound) break;
      const std::array<std::int64_t, 3> cr{r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2],
                                           r1[0] * r2[1] - r1[1] * r2[0]};
      if (cr[0] == 0 && cr[1] == 0 && cr[2] == 0) continue;
      for (const auto& r3 : rows) {
        const std::int64_t n3 = norm2(r3);
        if (static_cast<double>(n1 + n2 + n3) > frob_bound) break;
        if (r3[0] * cr[0] + r3[1] * cr[1] + r3[2] * cr[2] != 1) continue;
        out.push_back({r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Enumeration enumerate_sl3z(const LatticeSpec& spec, const RootSystemData& rs, const QuadratureScheme& quad,
                                  const EnumerationOptions& opt = {}) {
  spec.validate();
  if (spec.n != 3 || rs.n != 3) throw DimensionMismatch("enumerate_sl3z requires n = 3");
  if (spec.T > opt.max_T3)
    throw ResourceLimit("T=" + std::to_string(spec.T) + " exceeds the n=3 guard " + std::to_string(opt.max_T3));
  auto candidates = sl3z_ball_candidates(spec.T, rs.inner_scale);
  // drop elements of K (length 0) and those outside the open ball before building records
  std::vector<IntMatrix> inside;
  std::size_t non_regular = 0;
  for (const auto& g : candidates) {
    Mat m(3, 3);
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = static_cast<double>(g[i]);
    const CartanFactors cf = cartan(MatrixElement(m));
    const double len = length_of(rs, cf.H);
    if (!(len > 1e-9 && len < spec.T)) continue;
    if (!cf.regular) {
      ++non_regular;
      continue;
    }
    inside.push_back(g);
  }
  if (inside.size() > opt.max_records) throw ResourceLimit("record count exceeds the cap");
  Enumeration e = detail::build_records(rs, quad, spec.T, std::move(inside), opt.threads);
  e.non_regular += non_regular;
  return e;
}

inline Enumeration enumerate(const LatticeSpec& spec, const RootSystemData& rs, const QuadratureScheme& quad,
                             const EnumerationOptions& opt = {}) {
  return spec.n == 2 ? enumerate_sl2z(spec, rs, quad, opt) : enumerate_sl3z(spec, rs, quad, opt);
}

/// Records of a larger ball restricted to radius T (balls are nested).
inline std::vector<LatticePointRecord> restrict_ball(std::span<const LatticePointRecord> records, double T) {
  std::vector<LatticePointRecord> out;
  for (const auto& r : records)
    if (r.length < T) out.push_back(r);
  return out;
}

/// Records whose Cartan projection lies in the open cone of half-angle theta around H_max.
inline std::vector<LatticePointRecord> cone_filter(std::span<const LatticePointRecord> records,
                                                   const RootSystemData& rs, double theta) {
  if (!(theta > 0.0)) throw ValidationError("theta must be positive");
  (void)rs;
  std::vector<LatticePointRecord> out;
  for (const auto& r : records)
    if (r.angle < theta) out.push_back(r);
  return out;
}

/// Bucket k holds the indices of records with length in [T_{k-1}, T_k), T_{-1} = 0.
inline std::vector<std::vector<std::size_t>> annuli_partition(std::span<const LatticePointRecord> records,
                                                              std::span<const double> t_grid) {
  if (t_grid.empty()) throw ValidationError("T_grid must be nonempty");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i + 1])) throw ValidationError("T_grid must be strictly increasing");
  std::vector<std::vector<std::size_t>> buckets(t_grid.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), records[i].length);
    if (it != t_grid.end()) buckets[static_cast<std::size_t>(it - t_grid.begin())].push_back(i);
  }
  return buckets;
}

// ---------------------------------------------------------------------------
// Volumes
// ---------------------------------------------------------------------------

/// Integral of the Cartan Jacobian over the truncated (optionally cone-restricted)
/// chamber, with unit-mass K factors and Lebesgue measure from the scaled
/// inner product.
inline double volume_ball(const RootSystemData& rs, double T, std::optional<double> theta = std::nullopt) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  const auto [x, w] = gauss_legendre(48);
  const int radial_panels = std::max(4, static_cast<int>(std::ceil(4.0 * T)));
  auto radial = [&](auto&& integrand) {
    double total = 0.0;
    const double h = T / radial_panels;
    for (int p = 0; p < radial_panels; ++p) {
      const double lo = p * h;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = lo + 0.5 * h * (x[i] + 1.0);
        total += 0.5 * h * w[i] * integrand(r);
      }
    }
    return total;
  };
  if (rs.n == 2) {
    // rank one: every direction of the chamber is H_max, so the cone is the chamber
    return radial([&](double r) { return cartan_jacobian(rs, rs.h_max.scaled(r)); });
  }
  // A2: polar coordinates around H_max; the chamber is |phi| < pi/6.
  const double c = rs.inner_scale;
  const double half = std::min(theta.value_or(std::numbers::pi), std::numbers::pi / 6);
  const double u1[3] = {1 / std::sqrt(2.0 * c), 0.0, -1 / std::sqrt(2.0 * c)};
  const double u2[3] = {1 / std::sqrt(6.0 * c), -2 / std::sqrt(6.0 * c), 1 / std::sqrt(6.0 * c)};
  const auto [ax, aw] = gauss_legendre(64);
  return radial([&](double r) {
    double s = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
      const double phi = half * ax[i];
      const double cp = std::cos(phi), sp = std::sin(phi);
      double h[3];
      for (int k = 0; k < 3; ++k) h[k] = r * (cp * u1[k] + sp * u2[k]);
      const double j = std::sinh(h[0] - h[1]) * std::sinh(h[0] - h[2]) * std::sinh(h[1] - h[2]);
      s += half * aw[i] * std::max(j, 0.0);
    }
    return s * r;
  });
}

// ---------------------------------------------------------------------------
// Counting reports
// ---------------------------------------------------------------------------

struct EnumerationReport {
  LatticeSpec spec;
  std::size_t count = 0;
  std::vector<std::pair<double, std::size_t>> cone_counts;  // (theta, |Gamma_T^theta|)
  double volume = 0.0;
  double count_per_volume = 0.0;
  /// count * exp(-delta T)
  double count_growth_ratio = 0.0;
  std::vector<double> cone_ratios;  // |Gamma_T^theta| / |Gamma_T|
};

/// Counting statistics at each T of t_grid, from records of the largest ball.
inline std::vector<EnumerationReport> counting_report(std::span<const LatticePointRecord> records,
                                                      const LatticeSpec& base, std::span<const double> t_grid,
                                                      const RootSystemData& rs,
                                                      std::span<const double> theta_list) {
  if (t_grid.size() < 2) throw ValidationError("counting_report needs at least two T values");
  std::vector<EnumerationReport> out;
  for (double T : t_grid) {
    EnumerationReport rep;
    rep.spec = base;
    rep.spec.T = T;
    for (const auto& r : records)
      if (r.length < T) ++rep.count;
    for (double th : theta_list) {
      std::size_t k = 0;
      for (const auto& r : records)
        if (r.length < T && r.angle < th) ++k;
      rep.cone_counts.emplace_back(th, k);
      rep.cone_ratios.push_back(rep.count ? static_cast<double>(k) / rep.count : 0.0);
    }
    rep.volume = volume_ball(rs, T);
    rep.count_per_volume = rep.count / rep.volume;
    rep.count_growth_ratio = rep.count * std::exp(-rs.delta * T);
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration cache
// ---------------------------------------------------------------------------

inline constexpr int kCacheFormatVersion = 1;

/// The ball depends on the chamber normalization, so the scale is part of the key.
inline std::string cache_key(const LatticeSpec& spec, double inner_scale) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << spec.n << ";kind=" << (spec.kind == LatticeKind::full ? "full" : "congruence") << ";q=" << spec.q
     << ";T=" << spec.T << ";c=" << inner_scale;
  return os.str();
}

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline std::string cache_header(const LatticeSpec& spec, double inner_scale) {
  const std::string key = cache_key(spec, inner_scale);
  return "# ergolab-lattice v" + std::to_string(kCacheFormatVersion) + " " + fnv1a_hex(key) + " " + key;
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, const LatticeSpec& spec,
                                        double inner_scale) {
  return dir / ("lattice-" + fnv1a_hex(cache_key(spec, inner_scale)) + ".txt");
}

/// Header line, then one element per line: n*n integers, row-major.
inline void write_cache(const std::filesystem::path& path, const LatticeSpec& spec, double inner_scale,
                        std::span<const LatticePointRecord> records) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write cache file " + path.string());
  os << cache_header(spec, inner_scale) << "\n";
  for (const auto& r : records) {
    for (int i = 0; i < r.n * r.n; ++i) os << (i ? " " : "") << r.gamma[i];
    os << "\n";
  }
}

/// Reads the integer matrices of a cache file; nullopt if absent or stale.
inline std::optional<std::vector<IntMatrix>> read_cache(const std::filesystem::path& path, const LatticeSpec& spec,
                                                        double inner_scale) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string header;
  std::getline(is, header);
  if (header != cache_header(spec, inner_scale)) return std::nullopt;
  std::vector<IntMatrix> out;
  std::string line;
  const int m = spec.n * spec.n;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    IntMatrix g{};
    for (int i = 0; i < m; ++i)
      if (!(ls >> g[i])) throw ValidationError("malformed cache line in " + path.string());
    out.push_back(g);
  }
  return out;
}

/// enumerate() backed by the on-disk cache. Metadata is always recomputed.
inline Enumeration enumerate_cached(const LatticeSpec& spec, const RootSystemData& rs, const QuadratureScheme& quad,
                                    const std::filesystem::path& dir, const EnumerationOptions& opt = {}) {
  if (dir.empty()) return enumerate(spec, rs, quad, opt);
  const auto path = cache_path(dir, spec, rs.inner_scale);
  if (auto cached = read_cache(path, spec, rs.inner_scale))
    return detail::build_records(rs, quad, spec.T, std::move(*cached), opt.threads);
  Enumeration e = enumerate(spec, rs, quad, opt);
  std::filesystem::create_directories(dir);
  write_cache(path, spec, rs.inner_scale, e.records);
  return e;
}

}  // namespace ergolab
