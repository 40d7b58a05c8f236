#ifndef NEMATORUS_ENERGY_HPP
#define NEMATORUS_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "geometry.hpp"

namespace nematorus {

/// Splay, twist and bend surface moduli.
template <class Scalar = double>
struct ElasticConstants {
  Scalar k1 = 1;
  Scalar k2 = 1;
  Scalar k3 = 1;

  static ElasticConstants one_constant(Scalar k) { return {k, k, k}; }

  bool is_one_constant() const { return k1 == k2 && k2 == k3; }
  Scalar max() const { return std::max({k1, k2, k3}); }

  void validate() const {
    if (!(k1 > 0 && k2 > 0 && k3 > 0) || !std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(k3)) {
      std::ostringstream os;
      os << "elastic constants must be positive (k1=" << k1 << ", k2=" << k2 << ", k3=" << k3 << ")";
      throw InvalidConstants(os.str());
    }
  }

  friend bool operator==(const ElasticConstants&, const ElasticConstants&) = default;
};

using ElasticConstantsd = ElasticConstants<double>;

namespace detail {
template <class Scalar>
void require_ratio(Scalar mu) {
  if (!(mu > Scalar(1)) || !std::isfinite(mu)) {
    std::ostringstream os;
    os << "aspect ratio must satisfy mu > 1 (got " << mu << ")";
    throw InvalidRatio(os.str());
  }
}
}  // namespace detail

/// Curvature moments over the parameter square, all dimensionless:
///   I1 = int kappa_phi^2 dA, I2 = int c1^2 dA, I3 = int c2^2 dA.
template <class Scalar = double>
struct Moments {
  Scalar I1;
  Scalar I2;
  Scalar I3;
};

template <class Scalar>
Moments<Scalar> moments(Scalar mu) {
  detail::require_ratio(mu);
  constexpr Scalar four_pi2 = Scalar(4) * std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  const Scalar s = std::sqrt((mu - 1) * (mu + 1));
  // mu - s == 1 / (mu + s), written without cancellation.
  return {four_pi2 / (mu + s), four_pi2 * mu, four_pi2 * mu / (s * (mu + s))};
}

/// Constant-angle energy in frequency form, W(alpha) = A0 + A1 cos 2a + A2 cos^2 2a.
template <class Scalar = double>
struct FrequencyCoefficients {
  Scalar A0;
  Scalar A1;
  Scalar A2;

  Scalar value(Scalar alpha) const {
    const Scalar c = std::cos(Scalar(2) * alpha);
    return A0 + A1 * c + A2 * c * c;
  }
  /// dW/dalpha = -2 A1 sin 2a - 2 A2 sin 4a.
  Scalar derivative(Scalar alpha) const {
    return -Scalar(2) * A1 * std::sin(Scalar(2) * alpha) - Scalar(2) * A2 * std::sin(Scalar(4) * alpha);
  }
  /// d2W/dalpha2 = -4 A1 cos 2a - 8 A2 cos 4a.
  Scalar second_derivative(Scalar alpha) const {
    return -Scalar(4) * A1 * std::cos(Scalar(2) * alpha) - Scalar(8) * A2 * std::cos(Scalar(4) * alpha);
  }
};

template <class Scalar>
FrequencyCoefficients<Scalar> frequency_coefficients(const ElasticConstants<Scalar>& k, Scalar mu) {
  const Moments<Scalar> m = moments(mu);
  const Scalar sum23 = m.I2 + m.I3;
  return {(k.k1 + k.k3) * m.I1 / 4 + (k.k2 + k.k3) * sum23 / 8, (k.k1 - k.k3) * m.I1 / 4 + k.k3 * (m.I2 - m.I3) / 4,
          (k.k3 - k.k2) * sum23 / 8};
}

/// Exact W_NV of the constant field alpha on the torus of ratio mu (radius
/// independent). pi-periodic in alpha.
template <class Scalar>
Scalar constant_energy(Scalar alpha, const ElasticConstants<Scalar>& k, Scalar mu) {
  return frequency_coefficients(k, mu).value(alpha);
}

/// f(mu)/k = pi^2 (2 mu + (2 - mu^2) / sqrt(mu^2 - 1)), the alpha-independent
/// part of the one-constant energy.
template <class Scalar>
Scalar one_constant_offset(Scalar mu) {
  detail::require_ratio(mu);
  constexpr Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  const Scalar s = std::sqrt((mu - 1) * (mu + 1));
  return pi2 * (Scalar(2) * mu + (Scalar(2) - mu * mu) / s);
}

/// Classical energy of any constant field, per unit k: 2 pi^2 (mu - sqrt(mu^2 - 1)).
template <class Scalar>
Scalar classical_offset(Scalar mu) {
  detail::require_ratio(mu);
  constexpr Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  return Scalar(2) * pi2 / (mu + std::sqrt((mu - 1) * (mu + 1)));
}

/// Willmore functional of the torus, pi^2 mu^2 / sqrt(mu^2 - 1).
template <class Scalar>
Scalar willmore(Scalar mu) {
  detail::require_ratio(mu);
  constexpr Scalar pi2 = std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  return pi2 * mu * mu / std::sqrt((mu - 1) * (mu + 1));
}

/// (c1^2 - c2^2) cos(2 alpha) sqrt(g) on the inner equator theta = pi, per
/// d theta d phi, with r = 1. At alpha = pi/2 this is mu (2 - mu) / (mu - 1).
template <class Scalar>
Scalar near_hole_density(Scalar mu, Scalar alpha) {
  detail::require_ratio(mu);
  const auto geom = TorusGeometry<Scalar>::from_ratio(mu);
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar c1 = Scalar(1) / geom.r();
  const Scalar c2 = std::cos(pi) / geom.rho(pi);
  return (c1 * c1 - c2 * c2) * std::cos(Scalar(2) * alpha) * geom.r() * geom.rho(pi);
}

/// Darboux-frame strain measures of n = cos(alpha) e_theta + sin(alpha) e_phi.
template <class Scalar = double>
struct DarbouxScalars {
  Scalar kappa_t;  // (grad alpha - Omega) . t, t = nu x n
  Scalar kappa_n;  // (grad alpha - Omega) . n
  Scalar tau_n;    // (c1 - c2) sin(alpha) cos(alpha)
  Scalar c_n;      // c1 cos^2(alpha) + c2 sin^2(alpha)
};

/// grad_theta, grad_phi are the tangent components of grad_s alpha.
template <class Scalar>
DarbouxScalars<Scalar> darboux_scalars(const TorusGeometry<Scalar>& geom, const SurfacePoint<Scalar>& p, Scalar alpha,
                                       Scalar grad_theta, Scalar grad_phi) {
  const PointGeometry<Scalar> pg = point_geometry(geom, p);
  const Scalar sa = std::sin(alpha), ca = std::cos(alpha);
  const Vector3<Scalar> n = ca * pg.e_theta + sa * pg.e_phi;
  const Vector3<Scalar> t = pg.normal.cross(n);
  const Vector3<Scalar> v = (grad_theta - pg.spin_theta) * pg.e_theta + (grad_phi - pg.spin_phi) * pg.e_phi;
  return {v.dot(t), v.dot(n), (pg.c1 - pg.c2) * sa * ca, pg.c1 * ca * ca + pg.c2 * sa * sa};
}

}  // namespace nematorus

#endif
