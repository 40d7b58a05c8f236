#include "nematorus/io/commands.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "nematorus/nematorus.hpp"
#include "nematorus/io/csv.hpp"

namespace nematorus::io {

namespace {

namespace fs = std::filesystem;

constexpr int kScanSamples = 721;

std::string padded(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%09ld", step);
  return buf;
}

std::string winding_label(WindingNumber h) {
  return "h" + std::to_string(h.h_theta) + "_" + std::to_string(h.h_phi);
}

}  // namespace

int cmd_constant_analysis(const RunConfig& cfg, std::ostream& log) {
  const double mu = cfg.ratio();
  const auto k = cfg.constants();
  const auto coef = frequency_coefficients(k, mu);
  const auto eq = constant_equilibria(k, mu);
  const fs::path out = cfg.resolved_output_dir();
  const std::string tag = stamp(cfg);

  CsvDocument table(tag, {"alpha", "kind", "energy", "stability", "second_derivative"});
  for (const auto& e : eq) {
    table.cell(e.alpha).cell(to_string(e.kind)).cell(e.energy).cell(to_string(e.stability)).cell(e.second_derivative);
    table.end_row();
  }
  std::string regime_line;
  if (k.is_one_constant()) {
    double mu_star = std::nan("");
    try {
      mu_star = linear_critical_mu(cfg.n_theta, kDegenerateRatio + 1e-6, 2.0, 1e-8);
    } catch (const Error&) {
    }
    const auto rep = regime_report(k, mu, mu_star);
    regime_line = "regime=" + std::string(to_string(rep.regime)) + " cos2_coefficient=" +
                  format_number(rep.cos2_coefficient) +
                  " parallel_globally_minimal=" + (rep.parallel_globally_minimal ? "true" : "false") +
                  " nonconstant_expected=" + (rep.nonconstant_expected ? "true" : "false") +
                  " mu_star_linear=" + format_number(rep.mu_star);
    table.comment(regime_line);
  }
  write_file_atomic(out / "equilibria.csv", table.text());

  // W / (k pi^2) for one constant, W / (k1 pi^2) otherwise.
  const double scale = k.k1 * std::numbers::pi * std::numbers::pi;
  CsvDocument scan(tag, {"alpha", "W_scaled", "W"});
  for (int i = 0; i < kScanSamples; ++i) {
    const double a = -std::numbers::pi / 2 + std::numbers::pi * i / (kScanSamples - 1);
    const double w = coef.value(a);
    scan.cell(a).cell(w / scale).cell(w);
    scan.end_row();
  }
  write_file_atomic(out / "scan.csv", scan.text());

  log << "constant-analysis mu=" << format_number(mu) << " A0=" << format_number(coef.A0)
      << " A1=" << format_number(coef.A1) << " A2=" << format_number(coef.A2) << "\n";
  for (const auto& e : eq)
    log << "  " << to_string(e.kind) << " alpha=" << format_number(e.alpha) << " W=" << format_number(e.energy)
        << " W''=" << format_number(e.second_derivative) << " " << to_string(e.stability) << "\n";
  if (!regime_line.empty()) log << "  " << regime_line << "\n";
  log << "wrote " << (out / "equilibria.csv").string() << ", " << (out / "scan.csv").string() << "\n";
  return exit_ok;
}

int cmd_flow(const RunConfig& cfg, std::ostream& log) {
  const auto geom = cfg.geometry();
  const auto grid = cfg.grid();
  const auto k = cfg.constants();
  const fs::path out = cfg.resolved_output_dir();
  const std::string tag = stamp(cfg);

  auto params = cfg.flow_params();
  if (cfg.snapshot_every > 0) {
    params.on_snapshot = [&](const FlowSample<double>& s, const AngleField<double>& f) {
      write_file_atomic(out / "snapshots" / ("snapshot_" + padded(s.step) + ".csv"),
                        field_csv(f, geom, k, tag + "; step = " + std::to_string(s.step) + "; t = " + format_number(s.t)));
    };
  }
  const auto seed = seed_field<double>(grid, cfg.winding, cfg.alpha0, cfg.seed_noise(), cfg.rng_seed);
  const auto res = cfg.general_constants() ? flow_general(seed, geom, k, params) : flow_one_constant(seed, geom, params);
  const auto& rep = res.report;

  write_file_atomic(out / "final.csv", field_csv(res.field, geom, k, tag));
  write_file_atomic(out / "flow_history.csv", history_csv(rep, tag));
  const auto breakdown =
      cfg.general_constants() ? energy_general(res.field, geom, k) : energy_one_constant(res.field, geom, k.k1);
  write_file_atomic(out / "energy.csv", breakdown_csv(breakdown, tag));

  log << "flow mu=" << format_number(geom.mu()) << " grid=" << grid.n_theta << "x" << grid.n_phi
      << " dt=" << format_number(rep.dt) << " restarts=" << rep.restarts << (rep.axisymmetric ? " (axisymmetric)" : "")
      << "\n  converged=" << (rep.converged ? "true" : "false") << (rep.slow_manifold ? " (slow manifold)" : "")
      << " steps=" << rep.steps << " energy " << format_number(rep.initial_energy) << " -> "
      << format_number(rep.final_energy) << "\n  residual=" << format_number(rep.final_residual)
      << " balance_defect=" << format_number(rep.balance_defect) << " (tolerance "
      << format_number(rep.balance_tolerance) << ")\n";
  if (geom.near_singular()) log << "  warning: aspect ratio close to the horn torus, stiff stencil\n";
  log << "wrote " << (out / "final.csv").string() << ", " << (out / "flow_history.csv").string() << "\n";
  return rep.converged ? exit_ok : exit_not_converged;
}

int cmd_sweep_mu(const RunConfig& cfg, std::ostream& log) {
  if (cfg.general_constants() && !cfg.constants().is_one_constant())
    throw ConfigError("sweep-mu uses the one-constant flow; give constants.k");
  const auto grid = cfg.grid();
  const fs::path out = cfg.resolved_output_dir();
  const std::string tag = stamp(cfg);

  CsvDocument doc(tag, {"index", "mu", "class", "energy_certificate", "converged", "steps", "deviation",
                        "final_energy", "parallel_energy"});
  long index = 0;
  CriticalSearchOptions opt;
  opt.k = cfg.constants().k1;
  opt.max_steps = cfg.max_steps;
  opt.on_sample = [&](const CriticalSample& s) {
    doc.cell(static_cast<long long>(index++)).cell(s.mu).cell(s.nonconstant ? "nonconstant" : "constant");
    doc.cell(s.energy_certificate ? "true" : "false").cell(s.converged ? "true" : "false");
    doc.cell(static_cast<long long>(s.steps)).cell(s.deviation).cell(s.final_energy).cell(s.parallel_energy);
    doc.end_row();
    log << "  mu=" << format_number(s.mu) << " " << (s.nonconstant ? "nonconstant" : "constant")
        << (s.energy_certificate ? " (energy below alpha_p)" : "") << " steps=" << s.steps
        << " deviation=" << format_number(s.deviation) << std::endl;
  };

  log << "sweep-mu bracket [" << format_number(cfg.mu_lo) << ", " << format_number(cfg.mu_hi)
      << "] grid=" << grid.n_theta << "x" << grid.n_phi << " flow_tol=" << format_number(cfg.tol)
      << " mu_tol=" << format_number(cfg.mu_tol) << std::endl;
  try {
    const auto res = find_critical_mu({cfg.mu_lo, cfg.mu_hi}, grid, cfg.tol, cfg.mu_tol, opt);
    doc.comment("result mu_star=" + format_number(res.mu_star) + " lo=" + format_number(res.lo) +
                " hi=" + format_number(res.hi) + " evaluations=" + std::to_string(res.samples.size()));
    write_file_atomic(out / "sweep_mu.csv", doc.text());
    log << "mu_star=" << format_number(res.mu_star) << " in [" << format_number(res.lo) << ", "
        << format_number(res.hi) << "]\n";
  } catch (const BracketInvalid& e) {
    doc.comment(std::string("bracket invalid: ") + e.what());
    write_file_atomic(out / "sweep_mu.csv", doc.text());
    throw;
  }
  return exit_ok;
}

int cmd_winding_table(const RunConfig& cfg, std::ostream& log) {
  const auto geom = cfg.geometry();
  const auto grid = cfg.grid();
  const auto k = cfg.constants();
  if (!k.is_one_constant()) throw ConfigError("winding-table uses the one-constant flow; give constants.k");
  const fs::path out = cfg.resolved_output_dir();
  const std::string tag = stamp(cfg);

  WindingTableOptions opt;
  opt.k = k.k1;
  opt.noise = cfg.seed_noise();
  opt.rng_seed = cfg.rng_seed;
  opt.jobs = cfg.jobs;
  opt.flow = cfg.flow_params();
  const auto rows = winding_table(geom, grid, cfg.windings, opt);

  std::optional<double> ground;
  for (const auto& r : rows)
    if (r.error.empty() && r.converged && r.h == WindingNumber{0, 0}) ground = r.energy;
  if (!ground)
    for (const auto& r : rows)
      if (r.error.empty() && r.converged && (!ground || r.energy < *ground)) ground = r.energy;

  CsvDocument doc(tag, {"h_theta", "h_phi", "energy", "energy_minus_ground", "converged", "residual", "steps",
                        "measured_winding", "error"});
  bool all_ok = true;
  for (const auto& r : rows) {
    const bool ok = r.error.empty() && r.converged;
    all_ok = all_ok && ok;
    doc.cell(static_cast<long long>(r.h.h_theta)).cell(static_cast<long long>(r.h.h_phi));
    if (r.error.empty()) {
      doc.cell(r.energy).cell(ground ? r.energy - *ground : std::nan(""));
    } else {
      doc.cell("").cell("");
    }
    doc.cell(r.converged ? "true" : "false").cell(r.residual).cell(static_cast<long long>(r.steps));
    doc.cell(r.measured ? "\"" + format_winding(*r.measured) + "\"" : std::string("ambiguous"));
    doc.cell(r.error.empty() ? std::string() : "\"" + r.error + "\"");
    doc.end_row();
    if (r.error.empty())
      write_file_atomic(out / "windings" / (winding_label(r.h) + ".csv"), field_csv(r.field, geom, k, tag));
    log << "  h=(" << format_winding(r.h) << ") "
        << (r.error.empty() ? "W=" + format_number(r.energy) + (r.converged ? "" : " (not converged)")
                            : "failed: " + r.error)
        << "\n";
  }
  write_file_atomic(out / "windings.csv", doc.text());
  log << "wrote " << (out / "windings.csv").string() << "\n";
  return all_ok ? exit_ok : exit_not_converged;
}

int cmd_geometry_dump(const RunConfig& cfg, std::ostream& log) {
  const auto geom = cfg.geometry();
  const auto grid = cfg.grid();
  const fs::path out = cfg.resolved_output_dir();
  const std::string tag = stamp(cfg);

  CsvDocument doc(tag, {"theta", "phi", "x", "y", "z", "c1", "c2", "spin_theta", "spin_phi", "area_density"});
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int j = 0; j < grid.n_phi; ++j) {
      const SurfacePoint<double> p(two_pi<double> * i / grid.n_theta, two_pi<double> * j / grid.n_phi);
      const auto pg = point_geometry(geom, p);
      const auto x = geom.embed(p.theta, p.phi);
      doc.cell(p.theta).cell(p.phi).cell(x.x()).cell(x.y()).cell(x.z());
      doc.cell(pg.c1).cell(pg.c2).cell(pg.spin_theta).cell(pg.spin_phi).cell(pg.area_density);
      doc.end_row();
    }
  }
  write_file_atomic(out / "geometry.csv", doc.text());

  const double mu = geom.mu();
  const auto m = moments(mu);
  CsvDocument inv(tag, {"mu", "I1", "I2", "I3", "f_over_k", "classical_offset", "willmore"});
  inv.cell(mu).cell(m.I1).cell(m.I2).cell(m.I3).cell(one_constant_offset(mu)).cell(classical_offset(mu)).cell(willmore(mu));
  inv.end_row();
  write_file_atomic(out / "moments.csv", inv.text());

  log << "geometry-dump R=" << format_number(geom.R()) << " r=" << format_number(geom.r())
      << " mu=" << format_number(mu) << "\n  I1=" << format_number(m.I1) << " I2=" << format_number(m.I2)
      << " I3=" << format_number(m.I3) << "\n";
  if (geom.near_singular()) log << "  warning: aspect ratio close to the horn torus\n";
  log << "wrote " << (out / "geometry.csv").string() << ", " << (out / "moments.csv").string() << "\n";
  return exit_ok;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.validate();
    switch (cfg.command) {
      case Command::constant_analysis: return cmd_constant_analysis(cfg, log);
      case Command::flow: return cmd_flow(cfg, log);
      case Command::sweep_mu: return cmd_sweep_mu(cfg, log);
      case Command::winding_table: return cmd_winding_table(cfg, log);
      case Command::geometry_dump: return cmd_geometry_dump(cfg, log);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const BracketInvalid& e) {
    err << "invalid bracket: " << e.what() << "\n";
    return exit_bracket_invalid;
  } catch (const StepUnstable& e) {
    err << "unstable time step: " << e.what() << "\n";
    return exit_numerical_failure;
  } catch (const InvalidRatio& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const InvalidConstants& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const InvalidGrid& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical_failure;
  }
  return exit_ok;
}

}  // namespace nematorus::io
