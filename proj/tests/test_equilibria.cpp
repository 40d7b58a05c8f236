#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nematorus/equilibria.hpp"

using namespace nematorus;
constexpr double pi = std::numbers::pi;

namespace {

const ConstantEquilibrium<double>* find(const std::vector<ConstantEquilibrium<double>>& eq, EquilibriumKind k) {
  for (const auto& e : eq)
    if (e.kind == k) return &e;
  return nullptr;
}

// Dense-scan oracle: argmin of W over (-pi/2, pi/2].
double scan_argmin(const ElasticConstantsd& k, double mu, int n = 200000) {
  double best = 0, wbest = 1e300;
  for (int i = 1; i <= n; ++i) {
    const double a = -pi / 2 + pi * i / n;
    const double w = constant_energy(a, k, mu);
    if (w < wbest) wbest = w, best = a;
  }
  return best;
}

}  // namespace

TEST_CASE("helix branch at mu = 1.25") {
  const ElasticConstantsd k{1.0, 0.5, 1.0};
  CHECK(*helix_argument(k, 1.25) == doctest::Approx(-0.4).epsilon(1e-14));
  const auto eq = constant_equilibria(k, 1.25);
  REQUIRE(eq.size() == 4);
  const auto* hp = find(eq, EquilibriumKind::helix_plus);
  const auto* hm = find(eq, EquilibriumKind::helix_minus);
  REQUIRE(hp);
  REQUIRE(hm);
  CHECK(std::abs(hp->alpha - 0.5 * std::acos(-0.4)) < 1e-12);
  CHECK(hp->alpha == doctest::Approx(0.9912).epsilon(1e-4));
  CHECK(hm->alpha == -hp->alpha);
  CHECK(hp->energy == hm->energy);
  CHECK(hp->stability == Stability::global_min);
  CHECK(find(eq, EquilibriumKind::parallel)->stability == Stability::local_max);
  CHECK(find(eq, EquilibriumKind::meridian)->stability == Stability::global_max);
  CHECK(std::abs(std::abs(scan_argmin(k, 1.25)) - hp->alpha) < 1e-4);
}

TEST_CASE("every equilibrium is critical with a consistent label") {
  for (double mu : {1.1, 1.25, 1.6, 2.5}) {
    for (double k2 : {0.3, 0.5, 0.9, 1.0, 1.1, 1.5, 3.0}) {
      const ElasticConstantsd k{1.0, k2, 1.0};
      const auto c = frequency_coefficients(k, mu);
      for (const auto& e : constant_equilibria(k, mu)) {
        CHECK(std::abs(c.derivative(e.alpha)) < 1e-10);
        CHECK(e.alpha > -pi / 2);
        CHECK(e.alpha <= pi / 2);
        if (std::abs(e.second_derivative) < kDegenerateCurvature)
          CHECK(e.stability == Stability::degenerate);
        else if (e.second_derivative > 0)
          CHECK((e.stability == Stability::global_min || e.stability == Stability::local_min));
        else
          CHECK((e.stability == Stability::global_max || e.stability == Stability::local_max));
      }
    }
  }
  CHECK_THROWS_AS(constant_equilibria(ElasticConstantsd{1, 1, 1}, 1.0), InvalidRatio);
  CHECK_THROWS_AS(constant_equilibria(ElasticConstantsd{1, 0, 1}, 1.5), InvalidConstants);
}

TEST_CASE("stability regimes in k2 for k1 = k3 = 1, mu = 1.25") {
  const double mu = 1.25;
  auto label = [&](double k2, EquilibriumKind kind) {
    const auto eq = constant_equilibria(ElasticConstantsd{1.0, k2, 1.0}, mu);
    const auto* e = find(eq, kind);
    return e ? std::optional<Stability>(e->stability) : std::nullopt;
  };
  // k2 > xi1: alpha_m local minimum, alpha_p global minimum, helices maxima.
  CHECK(label(1.5, EquilibriumKind::meridian) == Stability::local_min);
  CHECK(label(1.5, EquilibriumKind::parallel) == Stability::global_min);
  CHECK(label(1.5, EquilibriumKind::helix_plus) == Stability::global_max);
  // xi2 <= k2 <= xi1: alpha_m global maximum, alpha_p global minimum, no helix.
  CHECK(label(1.0, EquilibriumKind::meridian) == Stability::global_max);
  CHECK(label(1.0, EquilibriumKind::parallel) == Stability::global_min);
  CHECK_FALSE(label(1.0, EquilibriumKind::helix_plus).has_value());
  // k2 < xi2: helices global minima, alpha_p local maximum, alpha_m global maximum.
  CHECK(label(0.5, EquilibriumKind::helix_plus) == Stability::global_min);
  CHECK(label(0.5, EquilibriumKind::parallel) == Stability::local_max);
  CHECK(label(0.5, EquilibriumKind::meridian) == Stability::global_max);
}

TEST_CASE("critical twist moduli are the W'' roots") {
  for (double mu : {1.05, 1.25, 2 / std::sqrt(3.0), 1.5, 1.9}) {
    const auto [xi1, xi2] = critical_k2(mu);
    const auto [rm, rp] = curvature_roots_k2(1.0, 1.0, mu);
    REQUIRE(rm);
    REQUIRE(rp);
    CHECK(std::abs(*rm - xi1) < 1e-10);
    CHECK(std::abs(*rp - xi2) < 1e-10);
    // W'' changes sign across the roots.
    auto w2 = [&](double k2, double a) { return frequency_coefficients(ElasticConstantsd{1, k2, 1}, mu).second_derivative(a); };
    CHECK(w2(xi1 - 1e-6, 0.0) * w2(xi1 + 1e-6, 0.0) < 0);
    CHECK(w2(xi2 - 1e-6, pi / 2) * w2(xi2 + 1e-6, pi / 2) < 0);
  }
  const auto [a, b] = critical_k2(1.25);
  CHECK(std::abs(a - 1.2) < 1e-12);
  CHECK(std::abs(b - 0.8) < 1e-12);
  const auto [c, d] = critical_k2(2 / std::sqrt(3.0));
  CHECK(c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(critical_k2(1.0 + 1e-8).first < 1e-3);
}

TEST_CASE("helix branch merges with alpha_m and alpha_p at the thresholds") {
  const double mu = 1.25;
  const auto [xi1, xi2] = critical_k2(mu);
  CHECK(*helix_argument(ElasticConstantsd{1, xi1, 1}, mu) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*helix_argument(ElasticConstantsd{1, xi2, 1}, mu) == doctest::Approx(-1.0).epsilon(1e-12));
  // Continuity of cos 2 alpha_h in k2.
  double prev = *helix_argument(ElasticConstantsd{1, 0.1, 1}, mu);
  for (double k2 = 0.11; k2 < xi2; k2 += 0.01) {
    const double a = *helix_argument(ElasticConstantsd{1, k2, 1}, mu);
    CHECK(std::abs(a - prev) < 0.05);
    prev = a;
  }
  CHECK_FALSE(helix_argument(ElasticConstantsd{1, 1, 1}, mu).has_value());
}

TEST_CASE("degenerate ratio and regimes") {
  const ElasticConstantsd k{};
  for (const auto& e : constant_equilibria(k, kDegenerateRatio)) CHECK(e.stability == Stability::degenerate);
  CHECK(regime_report(k, kDegenerateRatio, 1.52).regime == ConstantRegime::degenerate);
  CHECK(regime_report(k, 1.1, 1.52).regime == ConstantRegime::meridian_preferred);
  CHECK(regime_report(k, 1.6, 1.52).regime == ConstantRegime::parallel_preferred);
  CHECK(constant_energy(0.0, k, 1.1) < constant_energy(pi / 2, k, 1.1));
  CHECK(constant_energy(0.0, k, 1.6) > constant_energy(pi / 2, k, 1.6));
  CHECK(scan_argmin(k, 1.1, 7200) == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  const auto r = regime_report(k, 2.5, 1.52);
  CHECK(r.parallel_globally_minimal);
  CHECK_FALSE(r.nonconstant_expected);
  CHECK(regime_report(k, 1.4, 1.52).nonconstant_expected);
  CHECK(regime_report(k, kDegenerateRatio - 1e-3, 1.52).cos2_coefficient < 0);
  CHECK(regime_report(k, kDegenerateRatio + 1e-3, 1.52).cos2_coefficient > 0);
}
