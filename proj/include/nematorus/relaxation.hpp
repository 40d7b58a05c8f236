#ifndef NEMATORUS_RELAXATION_HPP
#define NEMATORUS_RELAXATION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "discrete_energy.hpp"
#include "energy.hpp"
#include "equilibria.hpp"
#include "field.hpp"
#include "geometry.hpp"

namespace nematorus {

/// Progress of a flow at one evaluated state.
template <class Scalar = double>
struct FlowSample {
  long step = 0;
  Scalar t = 0;
  Scalar energy = 0;
  Scalar max_rhs = 0;
  Scalar dissipation = 0;  // accumulated up to this state
};

template <class Scalar = double>
struct FlowParams {
  Scalar k = 1;                  // modulus for the one-constant flow
  std::optional<Scalar> dt;      // empty: dt_auto = 0.2 min(r dtheta, (R-r) dphi)^2 / k
  Scalar tol = 1e-8;             // stop when max |d alpha/dt| < tol
  long max_steps = 1'000'000;    // upper bound on Euler updates
  long snapshot_every = 0;       // 0 disables on_snapshot
  long history_every = 1;        // stride of the recorded energy history
  int max_restarts = 8;          // dt halvings in auto mode
  // Secondary stop: relative energy change below flat_rtol over flat_window
  // steps ends the run as converged with the slow_manifold flag set.
  bool flat_energy_stop = false;
  long flat_window = 100;
  Scalar flat_rtol = 1e-14;
  // Evolve a single column when the datum is phi-invariant and h_phi = 0.
  // Every column then follows identical arithmetic, so the result is
  // bit-for-bit that of the full grid.
  bool axisymmetric_reduction = true;
  std::uint64_t rng_seed = 0;    // recorded for replay

  /// Called at every evaluated state; returning false stops the run.
  std::function<bool(const FlowSample<Scalar>&)> observer;
  /// Called at step 0 and every snapshot_every steps.
  std::function<void(const FlowSample<Scalar>&, const AngleField<Scalar>&)> on_snapshot;
};

template <class Scalar = double>
struct FlowReport {
  bool converged = false;
  bool slow_manifold = false;
  bool stopped_by_observer = false;
  bool axisymmetric = false;
  long steps = 0;
  int restarts = 0;
  Scalar dt = 0;
  Scalar initial_energy = 0;
  Scalar final_energy = 0;
  std::vector<FlowSample<Scalar>> energy_history;
  Scalar dissipation_integral = 0;
  Scalar balance_defect = 0;     // |dissipation + W(final) - W(initial)|
  Scalar balance_tolerance = 0;  // 1e-3 |W(initial)|
  Scalar final_residual = 0;     // max |rhs| at the final state
  Scalar max_energy_increase = 0;
  WindingNumber final_winding;
  std::optional<WindingNumber> measured_winding;
  std::uint64_t rng_seed = 0;
};

/// Relative energy increase on one step that aborts the run.
inline constexpr double kStepUnstableRelative = 1e-9;

/// Default explicit step 0.2 min(r dtheta, (R - r) dphi)^2 / k.
template <class Scalar>
Scalar auto_time_step(const TorusGeometry<Scalar>& geom, const Grid& grid, Scalar k) {
  const Scalar h = std::min(geom.r() * Scalar(grid.d_theta()), (geom.R() - geom.r()) * Scalar(grid.d_phi()));
  return Scalar(0.2) * h * h / k;
}

namespace detail {

template <class Scalar>
bool is_phi_invariant(const NodeArray<Scalar>& u) {
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 1; j < u.cols(); ++j)
      if (u(i, j) != u(i, 0)) return false;
  return true;
}

template <class Scalar>
AngleField<Scalar> expand(const Grid& grid, WindingNumber h, const NodeArray<Scalar>& u) {
  if (u.cols() == grid.n_phi) return AngleField<Scalar>(grid, h, u);
  NodeArray<Scalar> full(grid.n_theta, grid.n_phi);
  for (int i = 0; i < grid.n_theta; ++i) full.row(i).setConstant(u(i, 0));
  return AngleField<Scalar>(grid, h, std::move(full));
}

struct FlowEvaluation {
  double energy;
};

/// Forward Euler on the discrete L2 gradient flow of `evaluate`, which maps
/// a deviation array to (energy, rhs, sum sqrt(g) rhs^2, max |rhs|).
template <class Scalar, class Evaluate>
FlowReport<Scalar> euler_flow(const AngleField<Scalar>& field0, const TorusGeometry<Scalar>& geom,
                              const FlowParams<Scalar>& params, Scalar k_scale, Evaluate&& evaluate,
                              AngleField<Scalar>& final_field) {
  if (!(params.tol > 0) || params.max_steps < 1 || params.history_every < 1)
    throw Error("flow parameters require tol > 0, max_steps >= 1, history_every >= 1");
  const Grid& grid = field0.grid();
  const WindingNumber h = field0.winding();
  const bool reduce = params.axisymmetric_reduction && h.h_phi == 0 && is_phi_invariant(field0.deviation());
  const NodeArray<Scalar> u0 = reduce ? NodeArray<Scalar>(field0.deviation().col(0)) : field0.deviation();

  const bool auto_dt = !params.dt.has_value();
  Scalar dt = auto_dt ? auto_time_step(geom, grid, k_scale) : *params.dt;
  if (!(dt > 0)) throw Error("time step must be positive");

  for (int attempt = 0;; ++attempt) {
    FlowReport<Scalar> rep;
    rep.axisymmetric = reduce;
    rep.dt = dt;
    rep.restarts = attempt;
    rep.rng_seed = params.rng_seed;
    rep.final_winding = h;
    rep.balance_tolerance = 0;

    NodeArray<Scalar> u = u0, rhs;
    Scalar t = 0, dissipation = 0, prev_energy = 0;
    std::vector<Scalar> window;
    bool unstable = false;
    long step = 0;
    Scalar energy = 0, max_rhs = 0;
    for (;; ++step) {
      const auto ev = evaluate(u, rhs);
      energy = ev.energy;
      max_rhs = ev.max_rhs;
      if (step == 0) {
        rep.initial_energy = energy;
      } else {
        const Scalar inc = energy - prev_energy;
        rep.max_energy_increase = std::max(rep.max_energy_increase, inc);
        if (inc > Scalar(kStepUnstableRelative) * std::abs(prev_energy)) {
          unstable = true;
          break;
        }
      }
      prev_energy = energy;
      const FlowSample<Scalar> sample{step, t, energy, max_rhs, dissipation};

      bool stop = false;
      if (max_rhs < params.tol) {
        rep.converged = true;
        stop = true;
      }
      if (!stop && params.flat_energy_stop) {
        window.push_back(energy);
        if (long(window.size()) > params.flat_window) {
          const Scalar old = window[window.size() - 1 - params.flat_window];
          if (std::abs(energy - old) < params.flat_rtol * std::abs(energy)) {
            rep.converged = true;
            rep.slow_manifold = true;
            stop = true;
          }
        }
      }
      if (!stop && params.observer && !params.observer(sample)) {
        rep.stopped_by_observer = true;
        stop = true;
      }
      if (!stop && step >= params.max_steps) stop = true;

      if (stop || step % params.history_every == 0) rep.energy_history.push_back(sample);
      if (params.on_snapshot && params.snapshot_every > 0 && step % params.snapshot_every == 0)
        params.on_snapshot(sample, expand(grid, h, u));
      if (stop) break;

      dissipation += dt * ev.rhs_norm_sq;
      u += dt * rhs;
      t += dt;
    }

    if (unstable) {
      if (auto_dt && attempt < params.max_restarts) {
        dt /= 2;
        continue;
      }
      std::ostringstream os;
      os << "energy increased at step " << step << " with dt = " << dt;
      throw StepUnstable(os.str());
    }

    rep.steps = step;
    rep.final_energy = energy;
    rep.final_residual = max_rhs;
    rep.dissipation_integral = dissipation;
    rep.balance_defect = std::abs(dissipation + energy - rep.initial_energy);
    rep.balance_tolerance = Scalar(1e-3) * std::abs(rep.initial_energy);
    final_field = expand(grid, h, u);
    try {
      rep.measured_winding = measure_winding(final_field.angles());
    } catch (const AmbiguousJump&) {
      rep.measured_winding.reset();
    }
    return rep;
  }
}

template <class Scalar>
struct EvalResult {
  Scalar energy;
  Scalar rhs_norm_sq;
  Scalar max_rhs;
};

}  // namespace detail

template <class Scalar = double>
struct FlowResult {
  AngleField<Scalar> field;
  FlowReport<Scalar> report;
};

/// Forward-Euler gradient flow d alpha/dt = k Delta_s alpha + (k/2)(c1^2 - c2^2) sin 2 alpha.
/// Only the periodic deviation evolves; the winding is carried unchanged.
template <class Scalar>
FlowResult<Scalar> flow_one_constant(const AngleField<Scalar>& field0, const TorusGeometry<Scalar>& geom,
                                     const FlowParams<Scalar>& params) {
  ElasticConstants<Scalar>::one_constant(params.k).validate();
  detail::DiscreteEnergy<Scalar> de(geom, field0.grid(), field0.winding());
  const Scalar offset = params.k * one_constant_offset(geom.mu());
  AngleField<Scalar> out(field0.grid(), field0.winding());
  auto rep = detail::euler_flow(field0, geom, params, params.k, [&](const NodeArray<Scalar>& u, NodeArray<Scalar>& rhs) {
    const auto r = de.one_constant(u, params.k, &rhs);
    return detail::EvalResult<Scalar>{r.dirichlet + r.potential + offset, r.rhs_norm_sq, r.max_rhs};
  }, out);
  return {std::move(out), std::move(rep)};
}

/// Steepest descent on the discrete nematic energy with general constants,
/// using its exact variational derivative. dt_auto uses max(k1, k2, k3).
template <class Scalar>
FlowResult<Scalar> flow_general(const AngleField<Scalar>& field0, const TorusGeometry<Scalar>& geom,
                                const ElasticConstants<Scalar>& k, const FlowParams<Scalar>& params) {
  k.validate();
  detail::DiscreteEnergy<Scalar> de(geom, field0.grid(), field0.winding());
  AngleField<Scalar> out(field0.grid(), field0.winding());
  auto rep = detail::euler_flow(field0, geom, params, k.max(), [&](const NodeArray<Scalar>& u, NodeArray<Scalar>& rhs) {
    const auto r = de.nematic(u, k, &rhs);
    return detail::EvalResult<Scalar>{r.splay + r.twist + r.bend_intrinsic + r.bend_extrinsic, r.rhs_norm_sq,
                                      r.max_rhs};
  }, out);
  return {std::move(out), std::move(rep)};
}

template <class Scalar = double>
struct Residual {
  NodeArray<Scalar> values;
  Scalar max_norm = 0;
};

/// k Delta_s alpha + (k/2)(c1^2 - c2^2) sin(2 alpha), node by node.
template <class Scalar>
Residual<Scalar> el_residual(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom, Scalar k) {
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  Residual<Scalar> out;
  out.max_norm = de.one_constant(field.deviation(), k, &out.values).max_rhs;
  return out;
}

/// -(1/sqrt(g)) dW/dalpha for general constants (the flow_general velocity).
template <class Scalar>
Residual<Scalar> nematic_residual(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom,
                                  const ElasticConstants<Scalar>& k) {
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  Residual<Scalar> out;
  out.max_norm = de.nematic(field.deviation(), k, &out.values).max_rhs;
  return out;
}

/// Lowest eigenvalue (per unit k) of the flow linearized about alpha_p,
/// -Delta_h + (c1^2 - c2^2), on the same theta discretization. The lowest
/// mode is phi-independent, so a single meridian suffices. alpha_p is
/// linearly stable iff the value is positive.
template <class Scalar>
Scalar alpha_p_stability(const TorusGeometry<Scalar>& geom, int n_theta) {
  const Grid grid(n_theta, 8);
  const detail::RowTables<Scalar> rt(geom, grid);
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat K = Mat::Zero(n_theta, n_theta);
  for (int i = 0; i < n_theta; ++i) {
    const int ip = (i + 1) % n_theta;
    const Scalar c = rt.rho_edge[i] / (rt.r * rt.d_theta);
    K(i, i) += c;
    K(ip, ip) += c;
    K(i, ip) -= c;
    K(ip, i) -= c;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_sqrt_mass(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    const Scalar mass = rt.r * rt.rho[i] * rt.d_theta;
    K(i, i) += mass * 2 * rt.potential[i];
    inv_sqrt_mass[i] = 1 / std::sqrt(mass);
  }
  const Mat S = inv_sqrt_mass.asDiagonal() * K * inv_sqrt_mass.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Ratio where alpha_p loses linear stability, by bisection on
/// alpha_p_stability over [mu_lo, mu_hi].
template <class Scalar>
Scalar linear_critical_mu(int n_theta, Scalar mu_lo, Scalar mu_hi, Scalar mu_tol = Scalar(1e-10)) {
  auto margin = [&](Scalar mu) { return alpha_p_stability(TorusGeometry<Scalar>::from_ratio(mu), n_theta); };
  if ((margin(mu_lo) < 0) == (margin(mu_hi) < 0))
    throw BracketInvalid("alpha_p stability does not change sign on the bracket");
  while (mu_hi - mu_lo > mu_tol) {
    const Scalar mid = (mu_lo + mu_hi) / 2;
    (margin(mid) < 0 ? mu_lo : mu_hi) = mid;
  }
  return (mu_lo + mu_hi) / 2;
}

/// Largest |alpha - mean(alpha)| over the nodes.
template <class Scalar>
Scalar max_deviation_from_mean(const AngleField<Scalar>& field) {
  const NodeArray<Scalar> a = field.angles();
  return (a - a.mean()).abs().maxCoeff();
}

/// Re-relax `state` after adding uniform noise of the given amplitude.
template <class Scalar>
FlowResult<Scalar> perturb_and_relax(const AngleField<Scalar>& state, const TorusGeometry<Scalar>& geom,
                                     const FlowParams<Scalar>& params, Scalar amplitude, std::uint64_t rng_seed) {
  AngleField<Scalar> noisy = state;
  const auto noise = seed_field<Scalar>(state.grid(), {}, Scalar(0), amplitude, rng_seed);
  noisy.deviation() += noise.deviation();
  return flow_one_constant(noisy, geom, params);
}

/// Outcome of relaxing alpha0 = pi/4 at one aspect ratio.
struct CriticalSample {
  double mu = 0;
  bool nonconstant = false;
  bool energy_certificate = false;  // energy fell below the discrete W(alpha_p)
  bool converged = false;
  long steps = 0;
  double final_energy = 0;
  double parallel_energy = 0;       // discrete energy of alpha = pi/2
  double deviation = 0;             // max |alpha - mean(alpha)|
};

struct CriticalSearchOptions {
  double k = 1;
  long max_steps = 1'000'000;
  double deviation_factor = 10;     // nonconstant when deviation > factor * flow_tol
  double certificate_margin = 1e-11;  // relative to |W(alpha_p)|
  std::function<void(const CriticalSample&)> on_sample;
};

/// Relax the constant datum pi/4 at ratio mu and classify the limit.
///
/// Along the flow the energy never increases, so reaching an energy strictly
/// below that of alpha_p proves the limit is not alpha_p; the run stops
/// there. Without that certificate the limit is constant, unless the flow
/// converged to a state whose spread about the mean exceeds
/// deviation_factor * flow_tol at an energy below W(alpha_p).
inline CriticalSample classify_ratio(double mu, const Grid& grid, double flow_tol,
                                     const CriticalSearchOptions& opt = {}) {
  const auto geom = TorusGeometry<double>::from_ratio(mu);
  const AngleField<double> parallel(grid, {}, NodeArray<double>::Constant(grid.n_theta, grid.n_phi,
                                                                          std::numbers::pi / 2));
  CriticalSample out;
  out.mu = mu;
  out.parallel_energy = energy_one_constant(parallel, geom, opt.k).total;
  const double threshold = out.parallel_energy - opt.certificate_margin * std::abs(out.parallel_energy);

  FlowParams<double> params;
  params.k = opt.k;
  params.tol = flow_tol;
  params.max_steps = opt.max_steps;
  params.history_every = std::max<long>(1, opt.max_steps / 1000);
  params.observer = [&](const FlowSample<double>& s) { return !(s.energy < threshold); };
  const auto seed = seed_field<double>(grid, {}, std::numbers::pi / 4, 0.0, 0);
  const auto res = flow_one_constant(seed, geom, params);

  out.energy_certificate = res.report.stopped_by_observer;
  out.converged = res.report.converged;
  out.steps = res.report.steps;
  out.final_energy = res.report.final_energy;
  out.deviation = max_deviation_from_mean(res.field);
  // A converged alpha_p limit near mu* keeps a spread of order tol/lambda
  // with lambda the small stability margin, so the spread alone is only
  // trusted together with an energy below W(alpha_p).
  out.nonconstant = out.energy_certificate ||
                    (out.converged && out.deviation > opt.deviation_factor * flow_tol &&
                     out.final_energy < out.parallel_energy);
  if (opt.on_sample) opt.on_sample(out);
  return out;
}

struct CriticalSearchResult {
  double mu_star = 0;
  double lo = 0;  // last ratio classified nonconstant
  double hi = 0;  // last ratio classified constant
  std::vector<CriticalSample> samples;
};

/// Bisection for the ratio mu* where relaxed minimizers from pi/4 change
/// from nonconstant (mu < mu*) to constant alpha_p (mu > mu*). Both bracket
/// ends are classified first; BracketInvalid unless the lower end is
/// nonconstant and the upper end constant. Returns the midpoint once the
/// bracket is narrower than mu_tol.
inline CriticalSearchResult find_critical_mu(std::pair<double, double> bracket, const Grid& grid, double flow_tol,
                                             double mu_tol, const CriticalSearchOptions& opt = {}) {
  auto [lo, hi] = bracket;
  if (!(lo < hi) || !(mu_tol > 0)) throw BracketInvalid("bracket must satisfy lo < hi and mu_tol > 0");
  if (!(lo > kDegenerateRatio) || !(hi < 2)) throw BracketInvalid("bracket must lie inside (2/sqrt(3), 2)");
  CriticalSearchResult out;
  const auto a = classify_ratio(lo, grid, flow_tol, opt);
  const auto b = classify_ratio(hi, grid, flow_tol, opt);
  out.samples = {a, b};
  if (a.nonconstant == b.nonconstant || !a.nonconstant) {
    std::ostringstream os;
    os << "bracket [" << lo << ", " << hi << "] does not straddle the transition (lower end "
       << (a.nonconstant ? "nonconstant" : "constant") << ", upper end " << (b.nonconstant ? "nonconstant" : "constant")
       << ")";
    throw BracketInvalid(os.str());
  }
  while (hi - lo >= mu_tol) {
    const double mid = (lo + hi) / 2;
    const auto s = classify_ratio(mid, grid, flow_tol, opt);
    out.samples.push_back(s);
    (s.nonconstant ? lo : hi) = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.mu_star = (lo + hi) / 2;
  return out;
}

/// One row of the winding-class table.
struct WindingRow {
  WindingNumber h;
  bool converged = false;
  double energy = 0;
  double residual = 0;
  long steps = 0;
  std::optional<WindingNumber> measured;
  AngleField<double> field{Grid(8, 8), {}};
  std::string error;  // non-empty when the run threw
};

struct WindingTableOptions {
  double k = 1;
  double noise = 0.05;
  std::uint64_t rng_seed = 7;
  unsigned jobs = 1;
  FlowParams<double> flow;  // k and rng_seed are overridden per row
};

/// Relax seed_field(h, 0, noise) for each class. Rows are independent and
/// may run on `jobs` threads; the result order follows `classes`.
inline std::vector<WindingRow> winding_table(const TorusGeometry<double>& geom, const Grid& grid,
                                             const std::vector<WindingNumber>& classes,
                                             const WindingTableOptions& opt = {}) {
  std::vector<WindingRow> rows(classes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx; (idx = next.fetch_add(1)) < classes.size();) {
      WindingRow& row = rows[idx];
      row.h = classes[idx];
      try {
        FlowParams<double> params = opt.flow;
        params.k = opt.k;
        params.rng_seed = opt.rng_seed;
        const auto seed = seed_field<double>(grid, row.h, 0.0, opt.noise, opt.rng_seed);
        auto res = flow_one_constant(seed, geom, params);
        row.converged = res.report.converged;
        row.energy = res.report.final_energy;
        row.residual = res.report.final_residual;
        row.steps = res.report.steps;
        row.measured = res.report.measured_winding;
        row.field = std::move(res.field);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(opt.jobs, unsigned(classes.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace nematorus

#endif
