#ifndef NEMATORUS_OPERATORS_HPP
#define NEMATORUS_OPERATORS_HPP

#include <cmath>
#include <vector>

#include "field.hpp"
#include "geometry.hpp"
#include "summation.hpp"

namespace nematorus {

namespace detail {

/// Per-meridian-row geometric coefficients shared by every stencil.
///
/// The theta-flux across the edge between rows i and i+1 uses the weight
///
///   rho_edge_i = R + r cos(theta_{i+1/2}) * (d/2) / sin(d/2),
///
/// a second-order approximation of rho(theta_{i+1/2}) chosen so that the
/// conservative stencil reproduces Delta_s(theta) = -sin(theta)/(r rho)
/// exactly at every node. The linear winding part therefore picks up no
/// discretization error, and the flux form keeps the operator exactly
/// adjoint to the discrete Dirichlet pairing.
template <class Scalar>
struct RowTables {
  RowTables(const TorusGeometry<Scalar>& geom, const Grid& grid)
      : r(geom.r()),
        d_theta(two_pi<Scalar> / Scalar(grid.n_theta)),
        d_phi(two_pi<Scalar> / Scalar(grid.n_phi)),
        theta(grid.n_theta),
        rho(grid.n_theta),
        rho_edge(grid.n_theta),
        weight(grid.n_theta),
        c1(grid.n_theta),
        c2(grid.n_theta),
        spin_phi(grid.n_theta),
        potential(grid.n_theta) {
    const Scalar half = d_theta / Scalar(2);
    const Scalar edge_factor = half / std::sin(half);
    for (int i = 0; i < grid.n_theta; ++i) {
      const Scalar th = Scalar(i) * d_theta;
      theta[i] = th;
      rho[i] = geom.rho(th);
      rho_edge[i] = geom.R() + geom.r() * std::cos(th + half) * edge_factor;
      if (!(rho_edge[i] > Scalar(0)))
        throw InvalidGrid("theta spacing too coarse for this aspect ratio (non-positive edge weight)");
      weight[i] = r * rho[i] * d_theta * d_phi;
      c1[i] = Scalar(1) / r;
      c2[i] = std::cos(th) / rho[i];
      spin_phi[i] = std::sin(th) / rho[i];
      potential[i] = (c1[i] * c1[i] - c2[i] * c2[i]) / Scalar(2);
    }
  }

  Scalar r;
  Scalar d_theta;
  Scalar d_phi;
  std::vector<Scalar> theta;
  std::vector<Scalar> rho;
  std::vector<Scalar> rho_edge;   // between rows i and i+1
  std::vector<Scalar> weight;     // sqrt(g) d_theta d_phi
  std::vector<Scalar> c1;
  std::vector<Scalar> c2;
  std::vector<Scalar> spin_phi;
  std::vector<Scalar> potential;  // (c1^2 - c2^2) / 2
};

/// Flux-form Laplace-Beltrami of alpha = linear part + u, evaluated on an
/// array with `cols` columns (a full grid, or one representative column of
/// a phi-invariant field).
template <class Scalar>
void apply_laplacian(const RowTables<Scalar>& rt, const NodeArray<Scalar>& u, WindingNumber h, NodeArray<Scalar>& out) {
  const int nt = int(u.rows()), np = int(u.cols());
  const Scalar lin_theta = Scalar(h.h_theta) * rt.d_theta / Scalar(2);
  const Scalar lin_phi = Scalar(h.h_phi) * rt.d_phi / Scalar(2);
  const Scalar inv_th = Scalar(1) / (rt.r * rt.r * rt.d_theta * rt.d_theta);
  const Scalar inv_ph = Scalar(1) / (rt.d_phi * rt.d_phi);
  out.resize(nt, np);
  for (int i = 0; i < nt; ++i) {
    const int ip = (i + 1) % nt, im = (i + nt - 1) % nt;
    const Scalar a_t = inv_th / rt.rho[i];
    const Scalar a_p = inv_ph / (rt.rho[i] * rt.rho[i]);
    for (int j = 0; j < np; ++j) {
      const int jp = (j + 1) % np, jm = (j + np - 1) % np;
      const Scalar up = u(ip, j) - u(i, j) + lin_theta;
      const Scalar dn = u(i, j) - u(im, j) + lin_theta;
      const Scalar rt_ = u(i, jp) - u(i, j) + lin_phi;
      const Scalar lf = u(i, j) - u(i, jm) + lin_phi;
      out(i, j) = a_t * (rt.rho_edge[i] * up - rt.rho_edge[im] * dn) + a_p * (rt_ - lf);
    }
  }
}

}  // namespace detail

/// Tangent components of a surface vector field, node by node.
template <class Scalar>
struct TangentField {
  NodeArray<Scalar> theta;  // component along e_theta
  NodeArray<Scalar> phi;    // component along e_phi
};

/// grad_s alpha with second-order central differences on the periodic part
/// and the exact derivative of the winding part.
template <class Scalar>
TangentField<Scalar> discrete_gradient(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom) {
  const Grid& g = field.grid();
  const detail::RowTables<Scalar> rt(geom, g);
  const auto& u = field.deviation();
  const Scalar ht = Scalar(field.winding().h_theta) / Scalar(2);
  const Scalar hp = Scalar(field.winding().h_phi) / Scalar(2);
  TangentField<Scalar> out{NodeArray<Scalar>(g.n_theta, g.n_phi), NodeArray<Scalar>(g.n_theta, g.n_phi)};
  for (int i = 0; i < g.n_theta; ++i) {
    const int ip = g.wrap_theta(i + 1), im = g.wrap_theta(i - 1);
    for (int j = 0; j < g.n_phi; ++j) {
      const int jp = g.wrap_phi(j + 1), jm = g.wrap_phi(j - 1);
      out.theta(i, j) = ((u(ip, j) - u(im, j)) / (Scalar(2) * rt.d_theta) + ht) / rt.r;
      out.phi(i, j) = ((u(i, jp) - u(i, jm)) / (Scalar(2) * rt.d_phi) + hp) / rt.rho[i];
    }
  }
  return out;
}

/// Conservative second-order Laplace-Beltrami operator. Exactly adjoint to
/// dirichlet_pairing for periodic arguments; exact on the winding part.
template <class Scalar>
NodeArray<Scalar> discrete_laplace_beltrami(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom) {
  const detail::RowTables<Scalar> rt(geom, field.grid());
  NodeArray<Scalar> out;
  detail::apply_laplacian(rt, field.deviation(), field.winding(), out);
  return out;
}

/// Discrete Dirichlet pairing sum grad_s u . grad_s v dA for periodic node
/// arrays, built from one-sided differences on grid edges. Satisfies
/// sum (Delta_s u) v dA == -dirichlet_pairing(u, v) up to rounding.
template <class Scalar>
Scalar dirichlet_pairing(const NodeArray<Scalar>& u, const NodeArray<Scalar>& v, const TorusGeometry<Scalar>& geom,
                         const Grid& grid) {
  const detail::RowTables<Scalar> rt(geom, grid);
  std::vector<Scalar> rows(grid.n_theta);
  std::vector<Scalar> terms(grid.n_phi);
  for (int i = 0; i < grid.n_theta; ++i) {
    const int ip = grid.wrap_theta(i + 1);
    const Scalar ct = rt.rho_edge[i] * rt.d_phi / (rt.r * rt.d_theta);
    const Scalar cp = rt.r * rt.d_theta / (rt.rho[i] * rt.d_phi);
    for (int j = 0; j < grid.n_phi; ++j) {
      const int jp = grid.wrap_phi(j + 1);
      terms[j] = ct * (u(ip, j) - u(i, j)) * (v(ip, j) - v(i, j)) + cp * (u(i, jp) - u(i, j)) * (v(i, jp) - v(i, j));
    }
    rows[i] = pairwise_sum(terms.data(), terms.size());
  }
  return pairwise_sum(rows.data(), rows.size());
}

/// Area-weighted node sum of f, i.e. the periodic trapezoid rule for the
/// surface integral.
template <class Scalar>
Scalar surface_integral(const NodeArray<Scalar>& f, const TorusGeometry<Scalar>& geom, const Grid& grid) {
  const detail::RowTables<Scalar> rt(geom, grid);
  std::vector<Scalar> rows(grid.n_theta);
  for (int i = 0; i < grid.n_theta; ++i) rows[i] = rt.weight[i] * pairwise_sum(&f(i, 0), std::size_t(grid.n_phi));
  return pairwise_sum(rows.data(), rows.size());
}

}  // namespace nematorus

#endif
