#ifndef NEMATORUS_FIELD_HPP
#define NEMATORUS_FIELD_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Core>

#include "errors.hpp"
#include "geometry.hpp"

namespace nematorus {

/// Row-major (theta slow, phi fast) node array.
template <class Scalar>
using NodeArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Periodic tensor grid on [0, 2pi)^2. Nodes sit at theta_i = i * d_theta and
/// phi_j = j * d_phi; index arithmetic wraps in both directions.
struct Grid {
  Grid(int n_theta_, int n_phi_) : n_theta(n_theta_), n_phi(n_phi_) {
    if (n_theta < 8 || n_phi < 8 || n_theta % 2 != 0 || n_phi % 2 != 0) {
      std::ostringstream os;
      os << "grid dimensions must be even and >= 8 (got " << n_theta << "x" << n_phi << ")";
      throw InvalidGrid(os.str());
    }
  }

  int n_theta;
  int n_phi;

  double d_theta() const { return two_pi<double> / n_theta; }
  double d_phi() const { return two_pi<double> / n_phi; }
  int wrap_theta(int i) const { return (i % n_theta + n_theta) % n_theta; }
  int wrap_phi(int j) const { return (j % n_phi + n_phi) % n_phi; }
  Eigen::Index size() const { return Eigen::Index(n_theta) * n_phi; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Homotopy class of a line field: number of half turns along a meridian
/// (h_theta) and along a parallel (h_phi).
struct WindingNumber {
  int h_theta = 0;
  int h_phi = 0;

  friend bool operator==(const WindingNumber&, const WindingNumber&) = default;
};

/// Director angle on the grid, split as
///
///   alpha(theta, phi) = (h_theta * theta + h_phi * phi) / 2 + u(theta, phi)
///
/// where u is periodic in both coordinates and stored without duplicated
/// boundary nodes. The linear part carries the winding exactly.
template <class Scalar = double>
class AngleField {
public:
  AngleField(Grid grid, WindingNumber winding, NodeArray<Scalar> deviation)
      : grid_(grid), winding_(winding), deviation_(std::move(deviation)) {
    if (deviation_.rows() != grid_.n_theta || deviation_.cols() != grid_.n_phi)
      throw InvalidGrid("deviation array does not match the grid");
  }

  AngleField(Grid grid, WindingNumber winding)
      : AngleField(grid, winding, NodeArray<Scalar>::Zero(grid.n_theta, grid.n_phi)) {}

  const Grid& grid() const { return grid_; }
  const WindingNumber& winding() const { return winding_; }
  const NodeArray<Scalar>& deviation() const { return deviation_; }
  NodeArray<Scalar>& deviation() { return deviation_; }

  Scalar theta(int i) const { return Scalar(i) * two_pi<Scalar> / Scalar(grid_.n_theta); }
  Scalar phi(int j) const { return Scalar(j) * two_pi<Scalar> / Scalar(grid_.n_phi); }

  /// Winding part of the angle at node (i, j).
  Scalar linear_part(int i, int j) const {
    return (Scalar(winding_.h_theta) * theta(i) + Scalar(winding_.h_phi) * phi(j)) / Scalar(2);
  }

  Scalar alpha(int i, int j) const { return linear_part(i, j) + deviation_(i, j); }

  /// Reconstructed (non-periodic) angle samples.
  NodeArray<Scalar> angles() const {
    NodeArray<Scalar> a(grid_.n_theta, grid_.n_phi);
    for (int i = 0; i < grid_.n_theta; ++i)
      for (int j = 0; j < grid_.n_phi; ++j) a(i, j) = alpha(i, j);
    return a;
  }

private:
  Grid grid_;
  WindingNumber winding_;
  NodeArray<Scalar> deviation_;
};

using AngleFieldd = AngleField<double>;

/// Seed datum alpha0 = (h_theta theta + h_phi phi)/2 + base + amplitude * xi,
/// xi uniform in [-1, 1] per node, drawn in row-major order from a
/// mt19937_64 seeded with rng_seed.
template <class Scalar = double>
AngleField<Scalar> seed_field(const Grid& grid, WindingNumber winding, Scalar base_angle, Scalar perturbation_amplitude,
                              std::uint64_t rng_seed) {
  if (!(perturbation_amplitude >= Scalar(0))) throw Error("perturbation amplitude must be >= 0");
  NodeArray<Scalar> u = NodeArray<Scalar>::Constant(grid.n_theta, grid.n_phi, base_angle);
  if (perturbation_amplitude > Scalar(0)) {
    std::mt19937_64 gen(rng_seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < grid.n_theta; ++i)
      for (int j = 0; j < grid.n_phi; ++j) u(i, j) += perturbation_amplitude * Scalar(dist(gen));
  }
  return AngleField<Scalar>(grid, winding, std::move(u));
}

namespace detail {

/// Reduce an increment modulo pi into (-pi/2, pi/2].
template <class Scalar>
Scalar reduce_mod_pi(Scalar d) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar r = d - pi * std::round(d / pi);
  if (r <= -pi / 2) r += pi;
  if (r > pi / 2) r -= pi;
  return r;
}

template <class Scalar>
Scalar checked_increment(Scalar from, Scalar to, Scalar tol, const char* where, int index) {
  const Scalar r = reduce_mod_pi(to - from);
  if (std::abs(r) >= std::numbers::pi_v<Scalar> / 2 - tol) {
    std::ostringstream os;
    os << "ambiguous line-field increment " << r << " rad along " << where << " " << index;
    throw AmbiguousJump(os.str());
  }
  return r;
}

template <class Scalar>
int half_turns(Scalar total) {
  const Scalar turns = total / std::numbers::pi_v<Scalar>;
  return int(std::lround(turns));
}

}  // namespace detail

inline constexpr double kDefaultJumpTolerance = 1e-6;

/// Half turns of the line field along the closed meridian phi = phi_j.
template <class Derived>
int winding_along_meridian(const Eigen::ArrayBase<Derived>& samples, int column,
                           typename Derived::Scalar tol = typename Derived::Scalar(kDefaultJumpTolerance)) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = samples.rows();
  Scalar total(0);
  for (Eigen::Index i = 0; i < n; ++i)
    total += detail::checked_increment(samples(i, column), samples((i + 1) % n, column), tol, "meridian", column);
  return detail::half_turns(total);
}

/// Half turns of the line field along the closed parallel theta = theta_i.
template <class Derived>
int winding_along_parallel(const Eigen::ArrayBase<Derived>& samples, int row,
                           typename Derived::Scalar tol = typename Derived::Scalar(kDefaultJumpTolerance)) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = samples.cols();
  Scalar total(0);
  for (Eigen::Index j = 0; j < n; ++j)
    total += detail::checked_increment(samples(row, j), samples(row, (j + 1) % n), tol, "parallel", row);
  return detail::half_turns(total);
}

/// Winding number of raw angle samples (theta-major), measured on the
/// meridian phi = 0 and the parallel theta = 0 by mod-pi unwrapping.
/// Throws AmbiguousJump when an increment cannot be unwrapped.
template <class Derived>
WindingNumber measure_winding(const Eigen::ArrayBase<Derived>& samples,
                              typename Derived::Scalar tol = typename Derived::Scalar(kDefaultJumpTolerance)) {
  return {winding_along_meridian(samples, 0, tol), winding_along_parallel(samples, 0, tol)};
}

}  // namespace nematorus

#endif
