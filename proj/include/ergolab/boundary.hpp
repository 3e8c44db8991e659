#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/boundary_point.hpp"
#include "ergolab/lie.hpp"

namespace ergolab {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// The G-action on K/M and the Radon-Nikodym cocycle
// ---------------------------------------------------------------------------

/// Result of pushing a frame lift k through h: the point kappa(h k) M and
/// rho(H_I(h k)).
struct Transported {
  BoundaryPoint point;
  double rho_hi = 0.0;
};

namespace detail {

inline double rho_weight(int n, int i) { return 0.5 * (n - 1) - i; }

/// Hot path. For n = 2 only the first column of h k matters:
/// rho(H_I) = (log r11 - log r22) / 2 with r11 r22 = det h.
inline Transported transport2(double h00, double h01, double h10, double h11, double det, double c, double s) {
  const double u1 = h00 * c + h01 * s;
  const double u2 = h10 * c + h11 * s;
  const double r2 = u1 * u1 + u2 * u2;
  const double r = std::sqrt(r2);
  return {BoundaryPoint::from_line2(u1 / r, u2 / r), 0.5 * std::log(r2 / det)};
}

inline Transported transport(const Mat& h, const Mat& lift) {
  const int n = static_cast<int>(h.rows());
  if (n == 2)
    return transport2(h(0, 0), h(0, 1), h(1, 0), h(1, 1), h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0), lift(0, 0),
                      lift(1, 0));
  Mat q, r;
  if (!orthonormalize(h * lift, q, r)) throw DecompositionFailure("rank-deficient product in boundary action");
  double logs[3];
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    logs[i] = std::log(r(i, i));
    mean += logs[i];
  }
  mean /= n;
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho += rho_weight(n, i) * (logs[i] - mean);
  return {BoundaryPoint::from_frame(q), rho};
}

}  // namespace detail

/// g . kM = kappa(g k) M.
inline BoundaryPoint act_on_boundary(const MatrixElement& g, const BoundaryPoint& b) {
  if (g.n() != b.n()) throw DimensionMismatch("element and boundary point of different dimension");
  return detail::transport(g.mat(), b.frame()).point;
}

/// c(g, kM) = exp(-2 rho(H_I(g k))).
inline double cocycle(const MatrixElement& g, const BoundaryPoint& b) {
  if (g.n() != b.n()) throw DimensionMismatch("element and boundary point of different dimension");
  return std::exp(-2.0 * detail::transport(g.mat(), b.frame()).rho_hi);
}

/// b(k1 a k2) = k1 M. Defined only on regular elements.
inline BoundaryPoint boundary_map(const CartanFactors& cf) {
  if (!cf.regular) throw NotRegular("element has repeated singular values and no boundary image");
  return BoundaryPoint::from_frame(cf.k1);
}

inline BoundaryPoint boundary_map(const MatrixElement& g) { return boundary_map(cartan(g)); }

/// b(g^-1) from the Cartan factors of g: k2^-1 m0^-1 M.
inline BoundaryPoint boundary_map_inverse(const RootSystemData& rs, const CartanFactors& cf) {
  if (!cf.regular) throw NotRegular("element has repeated singular values and no boundary image");
  return BoundaryPoint::from_frame(Mat(cf.k2.transpose() * rs.m0.transpose()));
}

/// The identity coset eM.
inline BoundaryPoint base_point(int n) { return BoundaryPoint::from_frame(Mat::Identity(n, n)); }

// ---------------------------------------------------------------------------
// Functions and regions on K/M
// ---------------------------------------------------------------------------

/// A complex function on K/M, evaluated on canonical points only.
struct BoundaryFunction {
  std::string name;
  std::function<Complex(const BoundaryPoint&)> eval;
  std::optional<Complex> known_integral;
  /// Upper bound on |f|.
  double bound = 1.0;

  Complex operator()(const BoundaryPoint& b) const { return eval(b); }
};

/// Azimuth arc [a, b) of the line (mod pi), optionally crossed with a band
/// z0 <= |v3| < z1 of its third coordinate (n = 3). Its nu-measure is
/// (b - a)/pi * (z1 - z0) for both n = 2 and n = 3.
struct BoundaryRegion {
  double a = 0.0;
  double b = std::numbers::pi;
  double z0 = 0.0;
  double z1 = 1.0;

  bool contains(const BoundaryPoint& p) const {
    const double t = p.angle();
    const bool in_arc = a <= b ? (t >= a && t < b) : (t >= a || t < b);
    if (!in_arc) return false;
    if (p.n() == 2) return true;
    const double z = std::abs(p(2, 0));
    return z >= z0 && (z < z1 || z1 >= 1.0);
  }

  double measure(int n) const {
    const double arc = a <= b ? b - a : std::numbers::pi - (a - b);
    const double band = n == 3 ? z1 - z0 : 1.0;
    return arc / std::numbers::pi * band;
  }
};

namespace functions {

inline BoundaryFunction one() {
  return {"one", [](const BoundaryPoint&) { return Complex(1.0, 0.0); }, Complex(1.0, 0.0), 1.0};
}

/// (v1 + i v2)^(2m) of the line v; exp(2 i m theta) when n = 2.
inline BoundaryFunction fourier(int m) {
  auto eval = [m](const BoundaryPoint& p) {
    const double x = p(0, 0), y = p(1, 0);
    Complex z(x * x - y * y, 2.0 * x * y);
    if (m < 0) z = std::conj(z);
    Complex out(1.0, 0.0);
    for (int k = 0, e = m < 0 ? -m : m; k < e; ++k) out *= z;
    return out;
  };
  return {"fourier:" + std::to_string(m), eval, Complex(m == 0 ? 1.0 : 0.0, 0.0), 1.0};
}

/// v1^2 - v2^2 of the line; cos(2 theta) when n = 2.
inline BoundaryFunction cos2() {
  auto eval = [](const BoundaryPoint& p) { return Complex(p(0, 0) * p(0, 0) - p(1, 0) * p(1, 0), 0.0); };
  return {"cos2", eval, Complex(0.0, 0.0), 1.0};
}

inline BoundaryFunction indicator(const BoundaryRegion& r, std::string name, int n) {
  auto eval = [r](const BoundaryPoint& p) { return Complex(r.contains(p) ? 1.0 : 0.0, 0.0); };
  return {std::move(name), eval, Complex(r.measure(n), 0.0), 1.0};
}

inline BoundaryFunction arc(double a, double b, int n = 2) {
  return indicator(BoundaryRegion{a, b}, "arc:" + std::to_string(a) + ":" + std::to_string(b), n);
}

inline BoundaryFunction sum(const std::vector<BoundaryFunction>& parts, std::string name) {
  std::optional<Complex> integral = Complex(0.0, 0.0);
  double bound = 0.0;
  for (const auto& p : parts) {
    if (p.known_integral && integral)
      *integral += *p.known_integral;
    else
      integral.reset();
    bound += p.bound;
  }
  auto eval = [parts](const BoundaryPoint& b) {
    Complex s(0.0, 0.0);
    for (const auto& p : parts) s += p.eval(b);
    return s;
  };
  return {std::move(name), eval, integral, bound};
}

}  // namespace functions

namespace detail {

inline double parse_number(std::string_view s, std::string_view field) {
  const std::string str(s);
  if (str == "pi") return std::numbers::pi;
  if (str == "pi/2") return std::numbers::pi / 2;
  if (str == "pi/4") return std::numbers::pi / 4;
  try {
    std::size_t used = 0;
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument(str);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string(field) + ": cannot parse number '" + str + "'");
  }
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace detail

/// Parses "arc:a:b" or "box:a:b:z0:z1"; "all" is the whole boundary and
/// "empty" the empty set.
inline BoundaryRegion parse_region(std::string_view spec, std::string_view field = "region") {
  if (spec == "all") return {};
  if (spec == "empty") return {0.0, 0.0, 0.0, 0.0};
  const auto parts = detail::split(spec, ':');
  if (parts[0] == "arc" && parts.size() == 3)
    return {detail::parse_number(parts[1], field), detail::parse_number(parts[2], field)};
  if (parts[0] == "box" && parts.size() == 5)
    return {detail::parse_number(parts[1], field), detail::parse_number(parts[2], field),
            detail::parse_number(parts[3], field), detail::parse_number(parts[4], field)};
  throw ValidationError(std::string(field) + ": unknown region '" + std::string(spec) + "'");
}

/// Parses a named test function: "one", "cos2", "fourier:m", "arc:a:b",
/// "box:a:b:z0:z1", or a '+'-separated sum of those (e.g. "one+cos2").
inline BoundaryFunction parse_function(std::string_view spec, int n = 2, std::string_view field = "function") {
  const auto terms = detail::split(spec, '+');
  if (terms.size() > 1) {
    std::vector<BoundaryFunction> parts;
    for (auto t : terms) parts.push_back(parse_function(t, n, field));
    return functions::sum(parts, std::string(spec));
  }
  if (spec == "one") return functions::one();
  if (spec == "cos2") return functions::cos2();
  const auto parts = detail::split(spec, ':');
  if (parts[0] == "fourier" && parts.size() == 2) {
    const double m = detail::parse_number(parts[1], field);
    if (m != std::floor(m)) throw ValidationError(std::string(field) + ": fourier index must be an integer");
    auto f = functions::fourier(static_cast<int>(m));
    f.name = std::string(spec);
    return f;
  }
  if (parts[0] == "arc" || parts[0] == "box")
    return functions::indicator(parse_region(spec, field), std::string(spec), n);
  throw ValidationError(std::string(field) + ": unknown function '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------
// The quasi-regular representation, pointwise
// ---------------------------------------------------------------------------

/// (pi(g) phi)(kM) = phi(g^-1 kM) exp(-rho(H_I(g^-1 k))).
inline Complex pi_eval(const MatrixElement& g, const BoundaryFunction& phi, const BoundaryPoint& b) {
  if (g.n() != b.n()) throw DimensionMismatch("element and boundary point of different dimension");
  const auto t = detail::transport(g.inverse().mat(), b.frame());
  return phi(t.point) * std::exp(-t.rho_hi);
}

}  // namespace ergolab
