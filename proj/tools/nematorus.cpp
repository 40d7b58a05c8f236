// nematorus: command-line driver for nematic shells on the torus.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nematorus/errors.hpp"
#include "nematorus/io/commands.hpp"
#include "nematorus/io/config.hpp"

using namespace nematorus;

namespace {

struct Flags {
  std::string command;
  std::string config_file;
  std::optional<std::string> mu, R, r, k, k1, k2, k3;
  std::optional<std::string> grid, winding, alpha0, noise, rng_seed, dt, tol, max_steps;
  std::optional<std::string> snapshot_every, history_every, bracket, mu_tol, windings, out, jobs;
  bool flat_stop = false;
  bool print_config = false;
};

io::RunConfig resolve(const Flags& f) {
  io::RunConfig cfg;
  if (!f.config_file.empty()) cfg = io::load_config(f.config_file);
  if (!f.command.empty()) cfg.command = io::parse_command(f.command);

  auto set = [&](const char* key, const std::optional<std::string>& v) {
    if (v) io::apply_setting(cfg, key, *v);
  };
  if (f.mu) cfg.R.reset(), cfg.r.reset();
  if (f.R || f.r) cfg.mu.reset();
  if (f.k) cfg.k1.reset(), cfg.k2.reset(), cfg.k3.reset();
  if (f.k1 || f.k2 || f.k3) cfg.k.reset();
  set("geometry.mu", f.mu);
  set("geometry.R", f.R);
  set("geometry.r", f.r);
  set("constants.k", f.k);
  set("constants.k1", f.k1);
  set("constants.k2", f.k2);
  set("constants.k3", f.k3);
  if (f.grid) {
    const auto x = f.grid->find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("--grid expects NxM (got '" + *f.grid + "')");
    io::apply_setting(cfg, "grid.n_theta", f.grid->substr(0, x));
    io::apply_setting(cfg, "grid.n_phi", f.grid->substr(x + 1));
  }
  set("seed.winding", f.winding);
  set("seed.alpha0", f.alpha0);
  set("seed.noise", f.noise);
  set("seed.rng_seed", f.rng_seed);
  set("flow.dt", f.dt);
  set("flow.tol", f.tol);
  set("flow.max_steps", f.max_steps);
  set("flow.snapshot_every", f.snapshot_every);
  set("flow.history_every", f.history_every);
  if (f.flat_stop) cfg.flat_energy_stop = true;
  if (f.bracket) {
    const auto c = f.bracket->find(',');
    if (c == std::string::npos) throw ConfigError("--bracket expects LO,HI (got '" + *f.bracket + "')");
    io::apply_setting(cfg, "sweep.mu_lo", f.bracket->substr(0, c));
    io::apply_setting(cfg, "sweep.mu_hi", f.bracket->substr(c + 1));
  }
  set("sweep.mu_tol", f.mu_tol);
  set("table.windings", f.windings);
  set("output.dir", f.out);
  set("jobs", f.jobs);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxation and equilibria of nematic director fields on a torus"};
  app.set_version_flag("--version", NEMATORUS_VERSION);
  Flags f;
  app.add_option("command", f.command, "constant-analysis | flow | sweep-mu | winding-table | geometry-dump")
      ->check(CLI::IsMember({"constant-analysis", "flow", "sweep-mu", "winding-table", "geometry-dump"}));
  app.add_option("--config", f.config_file, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--mu", f.mu, "aspect ratio R/r (r = 1)");
  app.add_option("--R", f.R, "major radius");
  app.add_option("--r", f.r, "minor radius");
  app.add_option("--k", f.k, "one-constant modulus");
  app.add_option("--k1", f.k1, "splay modulus");
  app.add_option("--k2", f.k2, "twist modulus");
  app.add_option("--k3", f.k3, "bend modulus");
  app.add_option("--grid", f.grid, "grid NxM (theta x phi)");
  app.add_option("--winding", f.winding, "winding H,K of the seed");
  app.add_option("--alpha0", f.alpha0, "seed base angle in radians");
  app.add_option("--noise", f.noise, "seed noise amplitude");
  app.add_option("--rng-seed", f.rng_seed, "seed of the noise generator");
  app.add_option("--dt", f.dt, "time step: auto or a value");
  app.add_option("--tol", f.tol, "stop when max |d alpha/dt| < tol");
  app.add_option("--max-steps", f.max_steps, "maximum number of Euler steps");
  app.add_option("--snapshot-every", f.snapshot_every, "write a field snapshot every N steps");
  app.add_option("--history-every", f.history_every, "record the energy every N steps");
  app.add_flag("--flat-stop", f.flat_stop, "also stop on a flat energy (slow-manifold flag)");
  app.add_option("--bracket", f.bracket, "sweep-mu bracket LO,HI");
  app.add_option("--mu-tol", f.mu_tol, "sweep-mu bracket width");
  app.add_option("--windings", f.windings, "winding-table classes H,K;H,K;...");
  app.add_option("--out", f.out, "output directory (default $NEMATORUS_OUT or .)");
  app.add_option("--jobs", f.jobs, "worker threads for table rows");
  app.add_flag("--print-config", f.print_config, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::exit_config_error;
  }

  io::RunConfig cfg;
  try {
    cfg = resolve(f);
    if (f.command.empty() && f.config_file.empty() && !f.print_config)
      throw ConfigError("no command given (see --help)");
    if (f.print_config) {
      cfg.validate();
      std::cout << io::serialize(cfg);
      return io::exit_ok;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return io::exit_config_error;
  }
  return io::run(cfg, std::cout, std::cerr);
}
