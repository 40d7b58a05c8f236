// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nematorus/nematorus.hpp"

using namespace nematorus;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Periodic trapezoid in theta, exact in phi.
double theta_quadrature(const std::function<double(double)>& f, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += f(2 * pi * i / n);
  return s * (2 * pi / n) * (2 * pi);
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// max over rows of the spread across phi
double phi_spread(const NodeArray<double>& u) {
  double s = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) s = std::max(s, u.row(i).maxCoeff() - u.row(i).minCoeff());
  return s;
}

Outcome moments_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (double mu : {1.05, 1.1547, 1.25, 1.5, 1.8, 2.0, 3.0, 10.0}) {
    auto rho = [mu](double t) { return mu + std::cos(t); };
    const auto m = moments(mu);
    const int n = 4000;
    worst = std::max({worst,
                      relative(m.I1, theta_quadrature([&](double t) { return std::sin(t) * std::sin(t) / rho(t); }, n)),
                      relative(m.I2, theta_quadrature(rho, n)),
                      relative(m.I3, theta_quadrature([&](double t) { return std::cos(t) * std::cos(t) / rho(t); }, n))});
  }
  const double dt = seconds_since(t0);
  o.require(worst < 1e-10, "max rel err " + num(worst) + " < 1e-10");
  o.require(dt < 1, "runtime " + num(dt) + " s < 1 s");
  return o;
}

Outcome degenerate_ratio() {
  Outcome o;
  const ElasticConstantsd k{};
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 720; ++i) {
    const double w = constant_energy(-pi / 2 + pi * i / 720, k, kDegenerateRatio);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  o.require(hi - lo < 1e-10, "spread over 721 angles " + num(hi - lo) + " < 1e-10");
  const double below = frequency_coefficients(k, kDegenerateRatio - 1e-3).A1;
  const double above = frequency_coefficients(k, kDegenerateRatio + 1e-3).A1;
  o.require(below * above < 0, "cos2a coefficient " + num(below) + " -> " + num(above));
  return o;
}

Outcome twist_regimes() {
  Outcome o;
  const double mu = 1.25;
  const auto [xi1, xi2] = critical_k2(mu);
  const auto [rm, rp] = curvature_roots_k2(1.0, 1.0, mu);
  o.require(rm && rp && std::abs(*rm - 1.2) < 1e-10 && std::abs(*rp - 0.8) < 1e-10 && std::abs(xi1 - 1.2) < 1e-10 &&
                std::abs(xi2 - 0.8) < 1e-10,
            "W'' roots " + num(rm.value_or(0)) + ", " + num(rp.value_or(0)));
  auto label = [&](double k2, EquilibriumKind kind) -> std::optional<Stability> {
    for (const auto& e : constant_equilibria(ElasticConstantsd{1.0, k2, 1.0}, mu))
      if (e.kind == kind) return e.stability;
    return std::nullopt;
  };
  using K = EquilibriumKind;
  using S = Stability;
  o.require(label(1.5, K::meridian) == S::local_min && label(1.5, K::parallel) == S::global_min,
            "k2 = 1.5: alpha_m local min, alpha_p global min");
  o.require(label(1.0, K::meridian) == S::global_max && label(1.0, K::parallel) == S::global_min &&
                !label(1.0, K::helix_plus),
            "k2 = 1.0: alpha_m global max, alpha_p global min, no helix");
  o.require(label(0.5, K::helix_plus) == S::global_min && label(0.5, K::helix_minus) == S::global_min &&
                label(0.5, K::parallel) == S::local_max && label(0.5, K::meridian) == S::global_max,
            "k2 = 0.5: helices global min, alpha_p local max, alpha_m global max");
  double helix = 0;
  for (const auto& e : constant_equilibria(ElasticConstantsd{1.0, 0.5, 1.0}, mu))
    if (e.kind == K::helix_plus) helix = e.alpha;
  const double err = std::abs(helix - 0.5 * std::acos(-0.4));
  o.require(err < 1e-12, "alpha_h = " + num(helix) + ", error " + num(err) + " < 1e-12");
  return o;
}

Outcome discrete_consistency() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = TorusGeometryd::from_ratio(1.8);
  const Grid grid(256, 256);
  const AngleFieldd par(grid, {}, NodeArray<double>::Constant(256, 256, pi / 2));
  const double e = energy_general(par, g, ElasticConstantsd{}).total;
  const double closed = constant_energy(pi / 2, ElasticConstantsd{}, 1.8);
  o.require(relative(e, closed) < 1e-6, "W_h(alpha_p) = " + num(e) + " vs closed form " + num(closed) + ", rel " +
                                            num(relative(e, closed)) + " < 1e-6");
  o.require(relative(e, 13.190) < 1e-4, "reference value 13.190 agrees to " + num(relative(e, 13.190)) + " < 1e-4 (4 digits)");

  const auto geom = TorusGeometryd::from_ratio(1.4);
  auto f = [](double t, double p) { return std::sin(2 * t) * std::cos(p) + std::cos(t); };
  auto exact = [&](double t, double p) {
    const double ft = 2 * std::cos(2 * t) * std::cos(p) - std::sin(t);
    const double ftt = -4 * std::sin(2 * t) * std::cos(p) - std::cos(t);
    const double fpp = -std::sin(2 * t) * std::cos(p);
    return laplace_beltrami(geom, t, ft, ftt, fpp);
  };
  double prev = 0, lo = 1e300, hi = -1e300;
  for (int n : {32, 64, 128, 256}) {
    const Grid gr(n, n);
    NodeArray<double> u(n, n), ref(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        u(i, j) = f(2 * pi * i / n, 2 * pi * j / n);
        ref(i, j) = exact(2 * pi * i / n, 2 * pi * j / n);
      }
    const double err = (discrete_laplace_beltrami(AngleFieldd(gr, {}, u), geom) - ref).abs().maxCoeff();
    if (prev > 0) {
      lo = std::min(lo, std::log2(prev / err));
      hi = std::max(hi, std::log2(prev / err));
    }
    prev = err;
  }
  o.require(lo >= 1.9 && hi <= 2.1, "Laplacian order in [" + num(lo) + ", " + num(hi) + "] within [1.9, 2.1]");
  const double dt = seconds_since(t0);
  o.require(dt < 10, "runtime " + num(dt) + " s < 10 s");
  return o;
}

Outcome flow_correctness() {
  Outcome o;
  const auto geom = TorusGeometryd::from_ratio(1.4);
  const Grid grid(256, 256);
  const auto seed = seed_field<double>(grid, {}, pi / 4, 0.0, 0);
  FlowParams<double> p;
  p.history_every = 1000;
  p.max_steps = 5'000'000;
  const auto a = flow_one_constant(seed, geom, p);
  p.dt = a.report.dt / 2;
  const auto b = flow_one_constant(seed, geom, p);

  double worst_rise = 0;
  for (const auto& r : {a.report, b.report})
    for (std::size_t n = 1; n < r.energy_history.size(); ++n)
      worst_rise = std::max(worst_rise, r.energy_history[n].energy - r.energy_history[n - 1].energy);
  worst_rise = std::max({worst_rise, a.report.max_energy_increase, b.report.max_energy_increase});
  o.require(a.report.converged && b.report.converged,
            "converged in " + std::to_string(a.report.steps) + " and " + std::to_string(b.report.steps) + " steps");
  o.require(worst_rise <= 1e-12, "largest energy rise " + num(worst_rise) + " <= 1e-12 (rounding)");
  const double w0 = std::abs(a.report.initial_energy);
  o.require(a.report.balance_defect / w0 < 1e-3, "balance defect / |W0| " + num(a.report.balance_defect / w0) + " < 1e-3");
  const double ratio = b.report.balance_defect / a.report.balance_defect;
  o.require(ratio > 0.4 && ratio < 0.6, "defect ratio under dt halving " + num(ratio) + " in [0.4, 0.6]");
  const double res = el_residual(a.field, geom, 1.0).max_norm;
  o.require(res < 1e-8, "el_residual " + num(res) + " < 1e-8");
  const double spread = phi_spread(a.field.deviation());
  o.require(spread < 1e-7, "phi spread " + num(spread) + " < 1e-7");
  o.detail += "; W " + num(a.report.initial_energy) + " -> " + num(a.report.final_energy);
  return o;
}

Outcome critical_ratio() {
  Outcome o;
  CriticalSearchOptions opt;
  auto t0 = std::chrono::steady_clock::now();
  const auto smoke = find_critical_mu({1.2, 1.9}, Grid(64, 64), 1e-8, 0.05, opt);
  const double t_smoke = seconds_since(t0);
  o.require(smoke.mu_star >= 1.40 && smoke.mu_star <= 1.65,
            "64x64: mu* = " + num(smoke.mu_star) + " in [1.40, 1.65]");
  o.require(t_smoke < 300, "64x64 runtime " + num(t_smoke) + " s < 300 s");

  opt.max_steps = 3'000'000;
  t0 = std::chrono::steady_clock::now();
  const auto full = find_critical_mu({1.2, 1.9}, Grid(128, 128), 1e-8, 0.01, opt);
  o.require(full.mu_star >= 1.45 && full.mu_star <= 1.60,
            "128x128: mu* = " + num(full.mu_star) + " in [1.45, 1.60] (reference 1.52), " +
                num(seconds_since(t0)) + " s");
  const double linear = linear_critical_mu(128, 1.3, 1.8);
  o.detail += "; linear stability loss of alpha_p at " + num(linear);
  return o;
}

Outcome amplitude_monotonicity() {
  Outcome o;
  const Grid grid(128, 128);
  auto amplitude = [&](double mu) {
    const auto res = flow_one_constant(seed_field<double>(grid, {}, pi / 4, 0.0, 0), TorusGeometryd::from_ratio(mu),
                                       FlowParams<double>{});
    return (res.field.angles().col(0) - pi / 2).abs().maxCoeff();
  };
  const double a12 = amplitude(1.2), a14 = amplitude(1.4);
  o.require(a12 > a14, "max |alpha - pi/2| on a meridian: " + num(a12) + " (mu = 1.2) > " + num(a14) + " (mu = 1.4)");
  return o;
}

Outcome winding_classes() {
  Outcome o;
  const auto geom = TorusGeometryd::from_ratio(1.8);
  const Grid grid(64, 64);
  const std::vector<WindingNumber> classes{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 3}, {1, 4}, {4, 1}};
  WindingTableOptions opt;
  opt.noise = 0.05;
  opt.rng_seed = 7;
  const auto rows = winding_table(geom, grid, classes, opt);
  bool all = true;
  std::string energies;
  for (const auto& r : rows) {
    all = all && r.error.empty() && r.converged && r.measured && *r.measured == r.h;
    energies += (energies.empty() ? "" : " ") + num(r.energy);
  }
  o.require(all, "all classes converge with winding preserved");
  bool ordered = true;
  for (std::size_t n = 1; n < rows.size(); ++n) ordered = ordered && rows[n - 1].energy < rows[n].energy;
  o.require(ordered, "energies strictly increasing in the listed order: " + energies);

  double worst_res = 0, worst_return = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    worst_res = std::max(worst_res, el_residual(r.field, geom, 1.0).max_norm);
    const auto again = perturb_and_relax(r.field, geom, opt.flow, 1e-3, 1000 + r.h.h_theta * 10 + r.h.h_phi);
    worst_return = std::max(worst_return, std::abs(again.report.final_energy - r.energy));
  }
  o.require(worst_res < opt.flow.tol, "max el_residual " + num(worst_res) + " < " + num(opt.flow.tol));
  o.require(worst_return < 1e-5, "re-relaxation after 1e-3 kick returns within " + num(worst_return) + " < 1e-5");
  return o;
}

Outcome classical_degeneracy() {
  Outcome o;
  const Grid grid(64, 64);
  double worst_spread = 0, worst_err = 0;
  for (double mu : {1.25, 1.8, 2.0}) {
    const auto g = TorusGeometryd::from_ratio(mu);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 100; ++i) {
      const double a = -pi / 2 + pi * i / 100;
      const double w = energy_classical(AngleFieldd(grid, {}, NodeArray<double>::Constant(64, 64, a)), g, 1.0);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    worst_spread = std::max(worst_spread, hi - lo);
    worst_err = std::max(worst_err, relative(lo, 2 * pi * pi * (mu - std::sqrt(mu * mu - 1))));
  }
  o.require(worst_spread < 1e-12, "spread over constant angles " + num(worst_spread) + " < 1e-12");
  o.require(worst_err < 1e-10, "vs 2 pi^2 (mu - sqrt(mu^2 - 1)): rel " + num(worst_err) + " < 1e-10");
  return o;
}

Outcome cross_identities() {
  Outcome o;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto g = TorusGeometryd::from_ratio(1.05 + 3 * (u(gen) + 1), 0.5 + (u(gen) + 1));
    const SurfacePoint<double> p(pi * (u(gen) + 1), pi * (u(gen) + 1));
    const double a = 3 * u(gen), at = 2 * u(gen), ap = 2 * u(gen);
    const auto grad = surface_gradient(g, p.theta, at, ap);
    const auto d = darboux_scalars(g, p, a, grad(0), grad(1));
    const double lhs = surface_gradient_matrix(g, p, a, at, ap).squaredNorm();
    const double sum = d.kappa_t * d.kappa_t + d.kappa_n * d.kappa_n + d.tau_n * d.tau_n + d.c_n * d.c_n;
    worst = std::max(worst, std::abs(lhs - sum) / std::max(1.0, lhs));
  }
  o.require(worst < 1e-12, "|grad n|^2 vs Darboux sum at 1e4 nodes " + num(worst) + " < 1e-12");

  double f_err = 0;
  for (double mu : {1.05, 1.25, 1.5, 1.8, 2.0, 3.0, 10.0}) {
    const double closed = one_constant_offset(mu);
    const auto m = moments(mu);
    const double combo = m.I1 / 2 + (m.I2 + m.I3) / 4;
    auto rho = [mu](double t) { return mu + std::cos(t); };
    const double quad = theta_quadrature(
        [&](double t) {
          const double spin = std::sin(t) / rho(t), c2 = std::cos(t) / rho(t);
          return 0.5 * (spin * spin + 0.5 * (1 + c2 * c2)) * rho(t);
        },
        4000);
    f_err = std::max({f_err, relative(combo, closed), relative(quad, closed)});
  }
  o.require(f_err < 1e-10, "f(mu): closed form, moments and quadrature agree to " + num(f_err) + " < 1e-10");

  const double h = near_hole_density(1.5, pi / 2);
  o.require(h == 1.5, "near-hole density at mu = 1.5 equals " + num(h));
  bool monotone = true;
  double prev = h;
  for (int e = 1; e <= 8; ++e) {
    const double v = near_hole_density(1.0 + std::pow(10.0, -e), pi / 2);
    monotone = monotone && v > prev;
    prev = v;
  }
  o.require(monotone && prev > 1e7, "grows monotonically as mu -> 1 (" + num(prev) + " at mu = 1 + 1e-8)");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "moments oracle", moments_oracle},
      {2, "degenerate ratio 2/sqrt(3)", degenerate_ratio},
      {3, "twist-modulus regimes", twist_regimes},
      {4, "discrete consistency", discrete_consistency},
      {5, "flow correctness", flow_correctness},
      {6, "critical ratio", critical_ratio},
      {7, "amplitude monotonicity", amplitude_monotonicity},
      {8, "winding classes", winding_classes},
      {9, "classical degeneracy", classical_degeneracy},
      {10, "cross-identities", cross_identities},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("criterion %2d %-28s %s  (%.1f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
