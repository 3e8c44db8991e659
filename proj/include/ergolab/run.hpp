#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "ergolab/averages.hpp"
#include "ergolab/report.hpp"

namespace ergolab {

// Experiment drivers behind the command-line subcommands. Each maps a
// RunConfig to a Table; run() wraps the table in an envelope and writes it.

inline constexpr const char* kCacheDirEnv = "ERGOLAB_CACHE_DIR";

/// Fills environment-derived defaults so the echoed config is explicit.
inline RunConfig resolve_defaults(RunConfig c) {
  if (c.cache_dir.empty())
    if (const char* env = std::getenv(kCacheDirEnv)) c.cache_dir = env;
  if (c.quad_nodes == 0) c.quad_nodes = c.n == 3 ? kDefaultEulerNodes : kDefaultCircleNodes;
  return c;
}

namespace detail {

struct Context {
  RootSystemData rs;
  QuadratureScheme quad;
  EnumerationOptions opt;
};

inline Context make_context(const RunConfig& c) {
  require_dimension(c.n);
  if (c.quad_nodes < 0) throw ValidationError("quad_nodes must be positive");
  if (c.max_records <= 0) throw ValidationError("max_records must be positive");
  Context ctx{root_data(c.n, c.inner_scale), default_quadrature(c.n, c.quad_nodes), {}};
  ctx.opt.max_T2 = c.max_T2;
  ctx.opt.max_T3 = c.max_T3;
  ctx.opt.max_records = static_cast<std::size_t>(c.max_records);
  return ctx;
}

inline void require_grid(const std::vector<double>& grid, const char* field) {
  if (grid.empty()) throw ValidationError(std::string(field) + " must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ValidationError(std::string(field) + " entries must be positive");
    if (i + 1 < grid.size() && !(grid[i] < grid[i + 1]))
      throw ValidationError(std::string(field) + " must be strictly increasing");
  }
}

inline LatticeSpec lattice_spec(const RunConfig& c, double T) {
  LatticeSpec s;
  s.n = c.n;
  s.T = T;
  s.q = c.level;
  s.kind = c.level > 1 ? LatticeKind::congruence : LatticeKind::full;
  s.validate();
  return s;
}

/// Records of the ball of the largest grid radius.
inline std::vector<LatticePointRecord> records_for(const RunConfig& c, const Context& ctx) {
  require_grid(c.t_grid, "T_grid");
  return enumerate_cached(lattice_spec(c, c.t_grid.back()), ctx.rs, ctx.quad, c.cache_dir, ctx.opt).records;
}

inline Cell num(double x) { return x; }
inline Cell num(std::size_t x) { return static_cast<std::int64_t>(x); }

inline std::vector<Cell> complex_cells(Complex z) { return {z.real(), z.imag()}; }

inline Table run_enumerate(const RunConfig& c, const Context& ctx) {
  require_grid(c.t_grid, "T");
  const auto records = records_for(c, ctx);
  Table t;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j) t.columns.push_back("g" + std::to_string(i + 1) + std::to_string(j + 1));
  for (int i = 0; i < c.n; ++i) t.columns.push_back("H" + std::to_string(i + 1));
  for (const char* col : {"length", "angle", "b_plus_theta", "b_minus_theta", "xi"}) t.columns.push_back(col);
  for (const auto& r : records) {
    std::vector<Cell> row;
    for (int i = 0; i < c.n * c.n; ++i) row.push_back(r.gamma[i]);
    for (int i = 0; i < c.n; ++i) row.push_back(r.H[i]);
    for (double x : {r.length, r.angle, r.b_plus.angle(), r.b_minus.angle(), r.xi}) row.push_back(x);
    t.add(std::move(row));
  }
  return t;
}

inline Table run_xi(const RunConfig& c, const Context& ctx) {
  require_grid(c.t_grid, "T_grid");
  Table t{{"t", "xi", "log_xi", "xi_inverse"}, {}};
  for (double s : c.t_grid) {
    const MatrixElement g = barycenter_flow(ctx.rs, s);
    const double xi = harish_chandra(ctx.rs, ctx.quad, g);
    t.add({s, xi, std::log(xi), harish_chandra(ctx.rs, ctx.quad, g.inverse())});
  }
  return t;
}

inline Table run_ergodic(const RunConfig& c, const Context& ctx) {
  AverageSpec spec{ctx.rs,
                   &ctx.quad,
                   parse_function(c.f, c.n, "f"),
                   parse_function(c.phi, c.n, "phi"),
                   parse_function(c.psi, c.n, "psi"),
                   c.t_grid,
                   c.theta};
  require_grid(c.t_grid, "T_grid");
  spec.validate();
  const auto records = records_for(c, ctx);
  Table t{{"T", "count", "estimate_re", "estimate_im", "target_re", "target_im", "abs_error"}, {}};
  for (const auto& r : convergence_suite(spec, records)) {
    std::vector<Cell> row{r.T, num(r.count)};
    if (r.null_row) {
      row.insert(row.end(), {Cell{}, Cell{}});
    } else {
      const auto e = complex_cells(r.estimate);
      row.insert(row.end(), e.begin(), e.end());
    }
    const auto g = complex_cells(r.target);
    row.insert(row.end(), g.begin(), g.end());
    row.push_back(r.null_row ? Cell{} : Cell{r.abs_error});
    t.add(std::move(row));
  }
  return t;
}

inline Table run_equidist(const RunConfig& c, const Context& ctx) {
  const BoundaryFunction f = parse_function(c.f, c.n, "f");
  const auto records = records_for(c, ctx);
  const Complex target = f.known_integral.value_or(inner_product(ctx.quad, f, functions::one()));
  Table t{{"T", "count", "estimate_re", "estimate_im", "target_re", "target_im", "abs_error"}, {}};
  for (double T : c.t_grid) {
    const auto ball = restrict_ball(records, T);
    if (ball.empty()) {
      t.add({T, num(ball.size()), Cell{}, Cell{}, target.real(), target.imag(), Cell{}});
      continue;
    }
    const Complex e = equidistribution_average(ball, f);
    t.add({T, num(ball.size()), e.real(), e.imag(), target.real(), target.imag(), std::abs(e - target)});
  }
  return t;
}

inline Table run_twosided(const RunConfig& c, const Context& ctx) {
  const BoundaryRegion u = parse_region(c.u, "U"), v = parse_region(c.v, "V");
  const auto records = records_for(c, ctx);
  const double target = u.measure(c.n) * v.measure(c.n);
  Table t{{"T", "count", "fraction", "target", "abs_error"}, {}};
  for (double T : c.t_grid) {
    const auto ball = restrict_ball(records, T);
    if (ball.empty()) {
      t.add({T, num(ball.size()), Cell{}, target, Cell{}});
      continue;
    }
    const double x = two_sided_fraction(ball, u, v);
    t.add({T, num(ball.size()), x, target, std::abs(x - target)});
  }
  return t;
}

inline Table run_count(const RunConfig& c, const Context& ctx) {
  const auto records = records_for(c, ctx);
  const double theta = c.theta.value_or(std::numbers::pi);
  const double thetas[] = {theta};
  Table t{{"T", "count", "volume", "count_per_volume", "count_exp_minus_delta_T", "theta", "cone_count", "cone_ratio"},
          {}};
  for (const auto& r : counting_report(records, lattice_spec(c, c.t_grid.back()), c.t_grid, ctx.rs, thetas))
    t.add({r.spec.T, num(r.count), r.volume, r.count_per_volume, r.count_growth_ratio, theta,
           num(r.cone_counts[0].second), r.cone_ratios[0]});
  return t;
}

inline Table run_volumes(const RunConfig& c, const Context& ctx) {
  require_grid(c.t_grid, "T_grid");
  const double rank_exp = 0.5 * (c.n - 2);
  Table t{{"T", "volume", "cone_volume", "closed_form", "shape_ratio"}, {}};
  for (double T : c.t_grid) {
    const double v = volume_ball(ctx.rs, T);
    const Cell cone = c.theta ? Cell{volume_ball(ctx.rs, T, c.theta)} : Cell{};
    const Cell closed = c.n == 2 ? Cell{std::cosh(T * std::sqrt(2.0 / ctx.rs.inner_scale)) - 1.0} : Cell{};
    t.add({T, v, cone, closed, v / (std::pow(T, rank_exp) * std::exp(ctx.rs.delta * T))});
  }
  return t;
}

inline Table run_markov(const RunConfig& c, const Context& ctx) {
  const auto records = records_for(c, ctx);
  Table t{{"T", "count", "sup", "mean"}, {}};
  for (double T : c.t_grid) {
    const auto ball = restrict_ball(records, T);
    if (ball.empty()) {
      t.add({T, num(ball.size()), Cell{}, Cell{}});
      continue;
    }
    const auto row = lattice_markov_row(ball, ctx.rs, ctx.quad);
    t.add({T, num(ball.size()), row.sup, row.mean});
  }
  return t;
}

inline Table run_peak(const RunConfig& c, const Context& ctx) {
  require_grid(c.s_grid, "s_grid");
  Table t{{"s", "value"}, {}};
  for (const auto& [s, v] : peak_decay_profile(ctx.rs, ctx.quad, c.r, c.s_grid)) t.add({s, v});
  return t;
}

inline Table run_koopman(const RunConfig& c, const Context& ctx) {
  if (c.n != 2) throw ValidationError("n: koopman runs on the circle (n = 2)");
  KoopmanSystem sys{c.alpha, ctx.quad.size() > 0 ? static_cast<int>(ctx.quad.size()) : 256, {}};
  for (auto s : c.sizes) {
    if (s < 1) throw ValidationError("sizes must be positive");
    sys.sizes.push_back(static_cast<std::size_t>(s));
  }
  if (sys.sizes.empty()) throw ValidationError("sizes must be nonempty");
  const auto rows = koopman_birkhoff(sys, parse_function(c.phi, 2, "phi"), parse_function(c.psi, 2, "psi"));
  const double gap = std::abs(1.0 - std::polar(1.0, 2.0 * std::numbers::pi * c.alpha));
  Table t{{"n", "estimate_re", "estimate_im", "target_re", "target_im", "geometric_bound"}, {}};
  for (const auto& r : rows)
    t.add({num(r.n), r.estimate.real(), r.estimate.imag(), r.target.real(), r.target.imag(),
           gap > 1e-12 ? Cell{2.0 / (static_cast<double>(r.n) * gap)} : Cell{}});
  return t;
}

inline Table run_annuli(const RunConfig& c, const Context& ctx) {
  const TestTriple triple{parse_function(c.f, c.n, "f"), parse_function(c.phi, c.n, "phi"),
                          parse_function(c.psi, c.n, "psi")};
  const auto records = records_for(c, ctx);
  const auto buckets = annuli_partition(records, c.t_grid);
  std::size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  Table t{{"T", "cells", "count", "deviation"}, {}};
  t.add({c.t_grid.back(), num(buckets.size()), num(total),
         annuli_identity_check(records, c.t_grid, ctx.rs, ctx.quad, triple)});
  return t;
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"enumerate", "xi",   "ergodic", "equidist", "twosided", "count",
                                              "volumes",   "markov", "peak",  "koopman",  "annuli"};
  return names;
}

/// Runs one experiment. Throws the library's errors unchanged.
inline Table run_table(const RunConfig& c) {
  const detail::Context ctx = detail::make_context(c);
  const std::string& cmd = c.command;
  if (cmd == "enumerate") return detail::run_enumerate(c, ctx);
  if (cmd == "xi") return detail::run_xi(c, ctx);
  if (cmd == "ergodic") return detail::run_ergodic(c, ctx);
  if (cmd == "equidist") return detail::run_equidist(c, ctx);
  if (cmd == "twosided") return detail::run_twosided(c, ctx);
  if (cmd == "count") return detail::run_count(c, ctx);
  if (cmd == "volumes") return detail::run_volumes(c, ctx);
  if (cmd == "markov") return detail::run_markov(c, ctx);
  if (cmd == "peak") return detail::run_peak(c, ctx);
  if (cmd == "koopman") return detail::run_koopman(c, ctx);
  if (cmd == "annuli") return detail::run_annuli(c, ctx);
  throw ValidationError("command: unknown command '" + cmd + "'");
}

inline void write_envelope(std::ostream& os, const ResultEnvelope& e) {
  if (e.config.format == "csv")
    write_envelope_csv(os, e);
  else
    write_envelope_json(os, e);
}

/// Runs the config and writes the envelope to config.out (stdout if empty).
/// Returns the process exit status: 0 ok, 2 validation error, 3 resource
/// limit, 1 any other failure.
inline int run(const RunConfig& raw, std::ostream& err = std::cerr) {
  try {
    const RunConfig c = resolve_defaults(raw);
    if (c.format != "json" && c.format != "csv") throw ValidationError("format: expected json or csv");
    const auto start = std::chrono::steady_clock::now();
    ResultEnvelope env{c, kLibraryVersion, 0.0, run_table(c)};
    env.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.out.empty()) {
      write_envelope(std::cout, env);
    } else {
      std::ofstream os(c.out);
      if (!os) throw ValidationError("out: cannot open '" + c.out + "'");
      write_envelope(os, env);
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ergolab
