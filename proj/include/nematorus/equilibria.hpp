#ifndef NEMATORUS_EQUILIBRIA_HPP
#define NEMATORUS_EQUILIBRIA_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "energy.hpp"

namespace nematorus {

enum class EquilibriumKind { meridian, parallel, helix_plus, helix_minus };
enum class Stability { global_min, local_min, local_max, global_max, degenerate };

constexpr std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::meridian: return "meridian";
    case EquilibriumKind::parallel: return "parallel";
    case EquilibriumKind::helix_plus: return "helix_plus";
    case EquilibriumKind::helix_minus: return "helix_minus";
  }
  return "?";
}

constexpr std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::global_min: return "global_min";
    case Stability::local_min: return "local_min";
    case Stability::local_max: return "local_max";
    case Stability::global_max: return "global_max";
    case Stability::degenerate: return "degenerate";
  }
  return "?";
}

/// Constant critical point of W(alpha), alpha in (-pi/2, pi/2].
template <class Scalar = double>
struct ConstantEquilibrium {
  Scalar alpha;
  EquilibriumKind kind;
  Scalar energy;
  Scalar second_derivative;
  Stability stability;
};

/// |W''| below this is labelled degenerate.
inline constexpr double kDegenerateCurvature = 1e-9;

/// Argument of the helix arccos, (B k3 + C k1) / (mu^2 (k2 - k3)) with
/// B = mu sqrt(mu^2 - 1) - 1 and C = B - mu^2 + 2; empty when k2 == k3.
template <class Scalar>
std::optional<Scalar> helix_argument(const ElasticConstants<Scalar>& k, Scalar mu) {
  detail::require_ratio(mu);
  if (k.k2 == k.k3) return std::nullopt;
  const Scalar B = mu * std::sqrt((mu - 1) * (mu + 1)) - 1;
  const Scalar C = B - mu * mu + 2;
  return (B * k.k3 + C * k.k1) / (mu * mu * (k.k2 - k.k3));
}

/// All constant equilibria of the nematic energy: alpha_m = 0, alpha_p = pi/2
/// and, when they exist, the helix pair +-alpha_h. Stability follows from
/// the exact second derivative; global/local is decided among the returned
/// critical points, which exhaust the critical set of W on a period.
template <class Scalar>
std::vector<ConstantEquilibrium<Scalar>> constant_equilibria(const ElasticConstants<Scalar>& k, Scalar mu) {
  detail::require_ratio(mu);
  k.validate();
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const auto coef = frequency_coefficients(k, mu);

  std::vector<std::pair<Scalar, EquilibriumKind>> points = {{Scalar(0), EquilibriumKind::meridian},
                                                             {pi / 2, EquilibriumKind::parallel}};
  if (const auto arg = helix_argument(k, mu); arg && *arg >= Scalar(-1) && *arg <= Scalar(1)) {
    const Scalar ah = std::acos(*arg) / 2;
    points.emplace_back(ah, EquilibriumKind::helix_plus);
    points.emplace_back(-ah, EquilibriumKind::helix_minus);
  }

  std::vector<ConstantEquilibrium<Scalar>> out;
  for (const auto& [alpha, kind] : points)
    out.push_back({alpha, kind, coef.value(alpha), coef.second_derivative(alpha), Stability::degenerate});

  Scalar lo = out.front().energy, hi = out.front().energy;
  for (const auto& e : out) {
    lo = std::min(lo, e.energy);
    hi = std::max(hi, e.energy);
  }
  const Scalar tie = Scalar(1e-12) * std::max(Scalar(1), std::abs(hi));
  for (auto& e : out) {
    if (std::abs(e.second_derivative) < Scalar(kDegenerateCurvature))
      e.stability = Stability::degenerate;
    else if (e.second_derivative > 0)
      e.stability = e.energy <= lo + tie ? Stability::global_min : Stability::local_min;
    else
      e.stability = e.energy >= hi - tie ? Stability::global_max : Stability::local_max;
  }
  return out;
}

/// Critical twist moduli for k1 = k3 = 1: xi1 = 2 sqrt(mu^2-1)/mu, where
/// W''(alpha_m) changes sign, and xi2 = 2 - xi1, where W''(alpha_p) does.
template <class Scalar>
std::pair<Scalar, Scalar> critical_k2(Scalar mu) {
  detail::require_ratio(mu);
  const Scalar xi1 = 2 * std::sqrt((mu - 1) * (mu + 1)) / mu;
  return {xi1, 2 - xi1};
}

/// Roots in k2 of W''(alpha_m) = 0 and W''(alpha_p) = 0 for arbitrary k1, k3
/// (W'' is affine in k2). Empty when the root would be non-positive.
template <class Scalar>
std::pair<std::optional<Scalar>, std::optional<Scalar>> curvature_roots_k2(Scalar k1, Scalar k3, Scalar mu) {
  const auto m = moments(mu);
  const Scalar sum23 = m.I2 + m.I3;
  const Scalar A1 = (k1 - k3) * m.I1 / 4 + k3 * (m.I2 - m.I3) / 4;
  // W''(0) = -4 A1 - (k3 - k2) sum23, W''(pi/2) = 4 A1 - (k3 - k2) sum23.
  const Scalar root_m = k3 + 4 * A1 / sum23;
  const Scalar root_p = k3 - 4 * A1 / sum23;
  auto positive = [](Scalar v) { return v > 0 ? std::optional<Scalar>(v) : std::nullopt; };
  return {positive(root_m), positive(root_p)};
}

enum class ConstantRegime { meridian_preferred, degenerate, parallel_preferred };

struct RegimeReport {
  ConstantRegime regime;
  double cos2_coefficient;        // A1; its sign decides alpha_m vs alpha_p
  bool parallel_globally_minimal; // mu >= 2: c1^2 - c2^2 >= 0 everywhere
  bool nonconstant_expected;      // mu < mu*
  double mu_star;
};

constexpr std::string_view to_string(ConstantRegime r) {
  switch (r) {
    case ConstantRegime::meridian_preferred: return "meridian_preferred";
    case ConstantRegime::degenerate: return "degenerate";
    case ConstantRegime::parallel_preferred: return "parallel_preferred";
  }
  return "?";
}

/// Degenerate ratio of the one-constant constant-angle energy, where
/// 2 mu = mu^2 / sqrt(mu^2 - 1).
inline const double kDegenerateRatio = 2.0 / std::sqrt(3.0);

/// Classify the constant-angle regime. The A1 sign decides which of
/// alpha_m, alpha_p has lower energy; for one constant it vanishes exactly
/// at mu = 2/sqrt(3). mu_star is supplied by the caller (relaxation).
template <class Scalar>
RegimeReport regime_report(const ElasticConstants<Scalar>& k, Scalar mu, double mu_star,
                           double degenerate_tol = 1e-12) {
  const auto coef = frequency_coefficients(k, mu);
  const double scale = std::max(1.0, double(std::abs(coef.A0)));
  ConstantRegime reg = ConstantRegime::degenerate;
  if (double(coef.A1) > degenerate_tol * scale)
    reg = ConstantRegime::parallel_preferred;
  else if (double(coef.A1) < -degenerate_tol * scale)
    reg = ConstantRegime::meridian_preferred;
  return {reg, double(coef.A1), double(mu) >= 2.0, double(mu) < mu_star, mu_star};
}

}  // namespace nematorus

#endif
