#ifndef NEMATORUS_GEOMETRY_HPP
#define NEMATORUS_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "errors.hpp"

namespace nematorus {

template <class Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <class Scalar>
inline constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

/// Reduce an angle into [0, 2pi).
template <class Scalar>
Scalar wrap_two_pi(Scalar a) {
  Scalar w = std::fmod(a, two_pi<Scalar>);
  if (w < Scalar(0)) w += two_pi<Scalar>;
  if (w >= two_pi<Scalar>) w = Scalar(0);
  return w;
}

/// Axisymmetric torus with major radius R and minor radius r, embedded as
///
///   X(theta, phi) = ((R + r cos theta) cos phi, (R + r cos theta) sin phi, r sin theta).
///
/// theta runs along meridians (theta = 0 is the outer equator, theta = pi the
/// inner one), phi along parallels. Immutable once constructed.
template <class Scalar = double>
class TorusGeometry {
public:
  /// Ratios at or below this bound are rejected.
  static constexpr double kMinRatio = 1.0 + 1e-9;
  /// Ratios up to this bound are accepted but reported as near-singular.
  static constexpr double kNearSingularRatio = 1.001;

  TorusGeometry(Scalar R, Scalar r) : R_(R), r_(r), mu_(R / r) {
    if (!(r > Scalar(0)) || !std::isfinite(R) || !std::isfinite(r)) {
      std::ostringstream os;
      os << "torus radii must be finite with r > 0 (R=" << R << ", r=" << r << ")";
      throw InvalidRatio(os.str());
    }
    if (!(mu_ > Scalar(kMinRatio))) {
      std::ostringstream os;
      os << "torus ratio mu = R/r must exceed 1 (got " << mu_ << ")";
      throw InvalidRatio(os.str());
    }
  }

  /// Torus with R = mu * r.
  static TorusGeometry from_ratio(Scalar mu, Scalar r = Scalar(1)) { return TorusGeometry(mu * r, r); }

  Scalar R() const { return R_; }
  Scalar r() const { return r_; }
  Scalar mu() const { return mu_; }
  bool near_singular() const { return mu_ <= Scalar(kNearSingularRatio); }

  /// Distance from the symmetry axis, R + r cos theta.
  Scalar rho(Scalar theta) const { return R_ + r_ * std::cos(theta); }

  Vector3<Scalar> embed(Scalar theta, Scalar phi) const {
    const Scalar rh = rho(theta);
    return {rh * std::cos(phi), rh * std::sin(phi), r_ * std::sin(theta)};
  }

private:
  Scalar R_;
  Scalar r_;
  Scalar mu_;
};

using TorusGeometryd = TorusGeometry<double>;

/// Parameter-space point; both angles are reduced into [0, 2pi).
template <class Scalar = double>
struct SurfacePoint {
  SurfacePoint(Scalar theta_, Scalar phi_) : theta(wrap_two_pi(theta_)), phi(wrap_two_pi(phi_)) {}
  Scalar theta;
  Scalar phi;
};

/// Pointwise differential geometry in the orthonormal frame (e_theta, e_phi)
/// with the inner normal. spin_theta/spin_phi are the components of the
/// spin connection Omega = -kappa_theta e_theta - kappa_phi e_phi.
template <class Scalar = double>
struct PointGeometry {
  Scalar c1;            // meridian principal curvature, 1/r
  Scalar c2;            // parallel principal curvature, cos theta / (R + r cos theta)
  Scalar spin_theta;    // identically zero on the torus
  Scalar spin_phi;      // sin theta / (R + r cos theta)
  Scalar area_density;  // sqrt(g) = r (R + r cos theta)
  Vector3<Scalar> e_theta;
  Vector3<Scalar> e_phi;
  Vector3<Scalar> normal;
};

template <class Scalar>
PointGeometry<Scalar> point_geometry(const TorusGeometry<Scalar>& geom, const SurfacePoint<Scalar>& p) {
  const Scalar st = std::sin(p.theta), ct = std::cos(p.theta);
  const Scalar sp = std::sin(p.phi), cp = std::cos(p.phi);
  const Scalar rho = geom.R() + geom.r() * ct;
  PointGeometry<Scalar> out;
  out.c1 = Scalar(1) / geom.r();
  out.c2 = ct / rho;
  out.spin_theta = Scalar(0);
  out.spin_phi = st / rho;
  out.area_density = geom.r() * rho;
  out.e_theta = Vector3<Scalar>(-st * cp, -st * sp, ct);  // X_theta / |X_theta|
  out.e_phi = Vector3<Scalar>(-sp, cp, Scalar(0));
  out.normal = -Vector3<Scalar>(ct * cp, ct * sp, st);
  return out;
}

/// Surface gradient of the director n = cos(alpha) e_theta + sin(alpha) e_phi,
/// given alpha and its coordinate derivatives at p. Rows and columns are
/// ordered (n, t, nu) with t = -sin(alpha) e_theta + cos(alpha) e_phi, so the
/// first row (n-component) and third column (normal direction) vanish.
template <class Scalar>
Matrix3<Scalar> surface_gradient_matrix(const TorusGeometry<Scalar>& geom, const SurfacePoint<Scalar>& p, Scalar alpha,
                                        Scalar alpha_theta, Scalar alpha_phi) {
  const Scalar rho = geom.rho(p.theta);
  const Scalar c1 = Scalar(1) / geom.r();
  const Scalar c2 = std::cos(p.theta) / rho;
  const Scalar sa = std::sin(alpha), ca = std::cos(alpha);
  const Scalar g_theta = alpha_theta / geom.r();
  const Scalar g_phi = alpha_phi / rho - std::sin(p.theta) / rho;

  Matrix3<Scalar> m = Matrix3<Scalar>::Zero();
  m(1, 0) = g_theta * ca + g_phi * sa;
  m(1, 1) = -g_theta * sa + g_phi * ca;
  m(2, 0) = c1 * ca * ca + c2 * sa * sa;
  m(2, 1) = (c2 - c1) * sa * ca;
  return m;
}

/// Tangent components of grad_s f from coordinate derivatives.
template <class Scalar>
Eigen::Matrix<Scalar, 2, 1> surface_gradient(const TorusGeometry<Scalar>& geom, Scalar theta, Scalar f_theta,
                                             Scalar f_phi) {
  return {f_theta / geom.r(), f_phi / geom.rho(theta)};
}

/// Laplace-Beltrami operator applied to f given its coordinate derivatives.
template <class Scalar>
Scalar laplace_beltrami(const TorusGeometry<Scalar>& geom, Scalar theta, Scalar f_theta, Scalar f_theta_theta,
                        Scalar f_phi_phi) {
  const Scalar r = geom.r();
  const Scalar rho = geom.rho(theta);
  return f_theta_theta / (r * r) - std::sin(theta) / (r * rho) * f_theta + f_phi_phi / (rho * rho);
}

}  // namespace nematorus

#endif
