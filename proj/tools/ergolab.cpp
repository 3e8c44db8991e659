// ergolab command-line driver: one subcommand per experiment family.
//
//   ergolab ergodic --n 2 --T-grid 6,9,12 --f cos2 --phi one --psi one --out r.json
//   ergolab enumerate --n 2 --T 1 --out pts.csv

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergolab/run.hpp"

namespace {

void add_common(CLI::App* sub, ergolab::RunConfig& c, std::string& format, double& theta, double& scale,
                double& single_t, unsigned& threads) {
  sub->add_option("--n", c.n, "dimension (2 or 3)");
  sub->add_option("--T-grid", c.t_grid, "comma-separated radii")->delimiter(',');
  sub->add_option("--T", single_t, "single radius (same as a one-point T grid)");
  sub->add_option("--theta", theta, "cone half-angle");
  sub->add_option("--quad", c.quad_nodes, "circle nodes (n=2) or per-axis Euler nodes (n=3)");
  sub->add_option("--inner-scale", scale, "chamber inner product scale c_n");
  sub->add_option("--f", c.f, "weight function on the boundary");
  sub->add_option("--phi", c.phi, "test function phi");
  sub->add_option("--psi", c.psi, "test function psi");
  sub->add_option("--U", c.u, "region U (all, empty, arc:a:b, box:a:b:z0:z1)");
  sub->add_option("--V", c.v, "region V");
  sub->add_option("--level", c.level, "principal congruence level q (n=2)");
  sub->add_option("--r", c.r, "peak radius");
  sub->add_option("--s-grid", c.s_grid, "comma-separated flow times")->delimiter(',');
  sub->add_option("--alpha", c.alpha, "rotation number");
  sub->add_option("--sizes", c.sizes, "comma-separated Birkhoff lengths")->delimiter(',');
  sub->add_option("--cache-dir", c.cache_dir, "enumeration cache directory")->envname(ergolab::kCacheDirEnv);
  sub->add_option("--out", c.out, "output file (stdout if absent)");
  sub->add_option("--format", format, "json or csv (default: from the --out extension)");
  sub->add_option("--max-T2", c.max_T2, "radius cap for n=2");
  sub->add_option("--max-T3", c.max_T3, "radius cap for n=3");
  sub->add_option("--max-records", c.max_records, "record count cap");
  sub->add_option("--seed", c.seed, "seed");
  sub->add_option("--threads", threads, "worker threads (default: ERGOLAB_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: lattice averages on the Furstenberg boundary of SL(n,R)"};
  app.require_subcommand(1);
  ergolab::RunConfig config;
  std::string format;
  double theta = 0.0, scale = 0.0, single_t = 0.0;
  unsigned threads = 0;
  for (const auto& name : ergolab::command_names())
    add_common(app.add_subcommand(name), config, format, theta, scale, single_t, threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  if (sub->count("--theta")) config.theta = theta;
  if (sub->count("--inner-scale")) config.inner_scale = scale;
  if (sub->count("--T")) {
    if (!config.t_grid.empty()) {
      std::cerr << "error: T: give either --T or --T-grid\n";
      return 2;
    }
    config.t_grid = {single_t};
  }
  if (!format.empty())
    config.format = format;
  else if (config.out.size() >= 4 && config.out.ends_with(".csv"))
    config.format = "csv";
  if (threads > 0) setenv("ERGOLAB_THREADS", std::to_string(threads).c_str(), 1);
  return ergolab::run(config);
}
