#ifndef NEMATORUS_DISCRETE_ENERGY_HPP
#define NEMATORUS_DISCRETE_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "energy.hpp"
#include "field.hpp"
#include "operators.hpp"
#include "summation.hpp"

namespace nematorus {

enum class EnergyModel { nematic, one_constant };

/// Energy of a field split into its contributions. For the nematic model the
/// active decomposition is splay + twist + bend_intrinsic + bend_extrinsic;
/// for the one-constant model it is dirichlet + potential + offset, with
/// offset = k f(mu).
template <class Scalar = double>
struct EnergyBreakdown {
  EnergyModel model = EnergyModel::nematic;
  Scalar total = 0;
  Scalar splay = 0;
  Scalar twist = 0;
  Scalar bend_intrinsic = 0;
  Scalar bend_extrinsic = 0;
  Scalar dirichlet = 0;
  Scalar potential = 0;
  Scalar offset = 0;

  Scalar active_sum() const {
    return model == EnergyModel::nematic ? splay + twist + bend_intrinsic + bend_extrinsic
                                         : dirichlet + potential + offset;
  }
};

namespace detail {

/// Discrete energy on the periodic grid and its exact variational derivative.
///
/// The intrinsic terms k1 kappa_t^2 + k3 kappa_n^2 are averaged over the four
/// one-sided (forward/backward in theta x forward/backward in phi) stencils
/// at each node. Terms quadratic in the theta difference are weighted by the
/// edge area (rho_edge), all others by the node area sqrt(g) dtheta dphi;
/// extrinsic terms are nodal. In the one-constant case the L2 gradient of
/// this energy is exactly k Delta_h alpha + k (c1^2 - c2^2)/2 sin 2 alpha with
/// the flux-form Delta_h of operators.hpp.
///
/// Arrays may have fewer columns than the grid (one column stands for a
/// phi-invariant field); row sums are then replicated with the same
/// pairwise bits as the full-width evaluation.
template <class Scalar>
class DiscreteEnergy {
public:
  struct Result {
    Scalar splay = 0, twist = 0, bend_intrinsic = 0, bend_extrinsic = 0;
    Scalar dirichlet = 0, potential = 0;
    Scalar rhs_norm_sq = 0;  // sum of sqrt(g) rhs^2 over nodes
    Scalar max_rhs = 0;
  };

  DiscreteEnergy(const TorusGeometry<Scalar>& geom, const Grid& grid, WindingNumber winding)
      : rt_(geom, grid), grid_(grid), winding_(winding) {
    edge_weight_.resize(grid.n_theta);
    for (int i = 0; i < grid.n_theta; ++i) edge_weight_[i] = rt_.r * rt_.rho_edge[i] * rt_.d_theta * rt_.d_phi;
  }

  const RowTables<Scalar>& tables() const { return rt_; }
  const Grid& grid() const { return grid_; }
  WindingNumber winding() const { return winding_; }

  /// One-constant energy and (optionally) the flow right-hand side.
  Result one_constant(const NodeArray<Scalar>& u, Scalar k, NodeArray<Scalar>* rhs = nullptr,
                      NodeArray<Scalar>* node_energy = nullptr) {
    const int nt = int(u.rows()), np = int(u.cols());
    resize(nt, np, 3);
    const Scalar lin_t = Scalar(winding_.h_theta) * rt_.d_theta / 2;
    const Scalar lin_p = Scalar(winding_.h_phi) * rt_.d_phi / 2;
    const Scalar inv_t2 = Scalar(1) / (rt_.r * rt_.r * rt_.d_theta * rt_.d_theta);
    const Scalar inv_p2 = Scalar(1) / (rt_.d_phi * rt_.d_phi);
    if (rhs) rhs->resize(nt, np);
    if (node_energy) node_energy->resize(nt, np);
    Scalar max_rhs = 0;
    for (int i = 0; i < nt; ++i) {
      const int ip = (i + 1) % nt, im = (i + nt - 1) % nt;
      const Scalar w = rt_.weight[i];
      const Scalar we_p = edge_weight_[i], we_m = edge_weight_[im];
      const Scalar lap_t = inv_t2 / rt_.rho[i];
      const Scalar lap_p = inv_p2 / (rt_.rho[i] * rt_.rho[i]);
      const Scalar lin_i = Scalar(winding_.h_theta) * rt_.theta[i] / 2;
      for (int j = 0; j < np; ++j) {
        const int jp = (j + 1) % np, jm = (j + np - 1) % np;
        const Scalar at_p = u(ip, j) - u(i, j) + lin_t;
        const Scalar at_m = u(i, j) - u(im, j) + lin_t;
        const Scalar ap_p = u(i, jp) - u(i, j) + lin_p;
        const Scalar ap_m = u(i, j) - u(i, jm) + lin_p;
        const Scalar alpha = lin_i + Scalar(winding_.h_phi) * phi(j) / 2 + u(i, j);
        const Scalar s2 = std::sin(2 * alpha), c2a = std::cos(2 * alpha);

        const Scalar dir = k / 4 *
                           ((we_p * at_p * at_p + we_m * at_m * at_m) * inv_t2 +
                            w * (ap_p * ap_p + ap_m * ap_m) * lap_p);
        const Scalar pot = k / 2 * w * rt_.potential[i] * c2a;
        buf_[0](i, j) = dir;
        buf_[1](i, j) = pot;
        if (node_energy) (*node_energy)(i, j) = (dir + pot) / w;
        if (rhs) {
          const Scalar f = k * (lap_t * (rt_.rho_edge[i] * at_p - rt_.rho_edge[im] * at_m) + lap_p * (ap_p - ap_m)) +
                           k * rt_.potential[i] * s2;
          (*rhs)(i, j) = f;
          buf_[2](i, j) = w * f * f;
          max_rhs = std::max(max_rhs, std::abs(f));
        }
      }
    }
    Result res;
    res.dirichlet = reduce(0);
    res.potential = reduce(1);
    if (rhs) {
      res.rhs_norm_sq = reduce(2);
      res.max_rhs = max_rhs;
    }
    return res;
  }

  /// Nematic energy for general constants and (optionally) the L2 gradient
  /// flow right-hand side -(1/sqrt(g)) dE/du, or the raw gradient dE/du.
  Result nematic(const NodeArray<Scalar>& u, const ElasticConstants<Scalar>& kc, NodeArray<Scalar>* rhs = nullptr,
                 NodeArray<Scalar>* node_energy = nullptr, NodeArray<Scalar>* raw_gradient = nullptr) {
    const int nt = int(u.rows()), np = int(u.cols());
    resize(nt, np, 5);
    const bool want_grad = rhs || raw_gradient;
    if (want_grad) {
      for (auto& f : flux_) f.resize(nt, np);
      explicit_.resize(nt, np);
    }
    if (node_energy) node_energy->resize(nt, np);
    const Scalar k1 = kc.k1, k2 = kc.k2, k3 = kc.k3;
    const Scalar lin_t = Scalar(winding_.h_theta) * rt_.d_theta / 2;
    const Scalar lin_p = Scalar(winding_.h_phi) * rt_.d_phi / 2;
    const Scalar inv_rdt = Scalar(1) / (rt_.r * rt_.d_theta);

    for (int i = 0; i < nt; ++i) {
      const int ip = (i + 1) % nt, im = (i + nt - 1) % nt;
      const Scalar w = rt_.weight[i];
      const Scalar omega[2] = {edge_weight_[i], edge_weight_[im]};
      const Scalar inv_rdp = Scalar(1) / (rt_.rho[i] * rt_.d_phi);
      const Scalar spin = rt_.spin_phi[i];
      const Scalar c1 = rt_.c1[i], c2 = rt_.c2[i];
      const Scalar lin_i = Scalar(winding_.h_theta) * rt_.theta[i] / 2;
      for (int j = 0; j < np; ++j) {
        const int jp = (j + 1) % np, jm = (j + np - 1) % np;
        const Scalar a[2] = {(u(ip, j) - u(i, j) + lin_t) * inv_rdt, (u(i, j) - u(im, j) + lin_t) * inv_rdt};
        const Scalar b[2] = {(u(i, jp) - u(i, j) + lin_p) * inv_rdp - spin,
                             (u(i, j) - u(i, jm) + lin_p) * inv_rdp - spin};
        const Scalar alpha = lin_i + Scalar(winding_.h_phi) * phi(j) / 2 + u(i, j);
        const Scalar sa = std::sin(alpha), ca = std::cos(alpha);
        const Scalar coef_a = k1 * sa * sa + k3 * ca * ca;

        Scalar splay = 0, bend_i = 0, d_explicit = 0;
        Scalar pa[2] = {0, 0}, pb[2] = {0, 0};
        for (int qt = 0; qt < 2; ++qt) {
          const Scalar extra = omega[qt] - w;
          for (int qp = 0; qp < 2; ++qp) {
            const Scalar kn = a[qt] * ca + b[qp] * sa;
            const Scalar kt = -a[qt] * sa + b[qp] * ca;
            splay += w * k1 * kt * kt + extra * a[qt] * a[qt] * k1 * sa * sa;
            bend_i += w * k3 * kn * kn + extra * a[qt] * a[qt] * k3 * ca * ca;
            if (want_grad) {
              pa[qt] += w * (k3 * kn * ca - k1 * kt * sa) + extra * a[qt] * coef_a;
              pb[qp] += w * (k1 * kt * ca + k3 * kn * sa);
              d_explicit += w * (k3 - k1) * kn * kt + extra * a[qt] * a[qt] * (k1 - k3) * sa * ca;
            }
          }
        }
        splay /= 8;
        bend_i /= 8;
        const Scalar tau = (c1 - c2) * sa * ca;
        const Scalar cn = c1 * ca * ca + c2 * sa * sa;
        const Scalar twist = w * k2 * tau * tau / 2;
        const Scalar bend_e = w * k3 * cn * cn / 2;
        buf_[0](i, j) = splay;
        buf_[1](i, j) = twist;
        buf_[2](i, j) = bend_i;
        buf_[3](i, j) = bend_e;
        if (node_energy) (*node_energy)(i, j) = (splay + twist + bend_i + bend_e) / w;
        if (want_grad) {
          flux_[0](i, j) = pa[0] / 4 * inv_rdt;
          flux_[1](i, j) = pa[1] / 4 * inv_rdt;
          flux_[2](i, j) = pb[0] / 4 * inv_rdp;
          flux_[3](i, j) = pb[1] / 4 * inv_rdp;
          const Scalar c2a = ca * ca - sa * sa, s2a = 2 * sa * ca;
          explicit_(i, j) = d_explicit / 4 + w * (k2 * tau * (c1 - c2) * c2a - k3 * cn * (c1 - c2) * s2a);
        }
      }
    }

    Scalar max_rhs = 0;
    if (want_grad) {
      if (rhs) rhs->resize(nt, np);
      if (raw_gradient) raw_gradient->resize(nt, np);
      for (int i = 0; i < nt; ++i) {
        const int ip = (i + 1) % nt, im = (i + nt - 1) % nt;
        const Scalar w = rt_.weight[i];
        for (int j = 0; j < np; ++j) {
          const int jp = (j + 1) % np, jm = (j + np - 1) % np;
          const Scalar g = explicit_(i, j) + (flux_[0](im, j) - flux_[0](i, j)) + (flux_[1](i, j) - flux_[1](ip, j)) +
                           (flux_[2](i, jm) - flux_[2](i, j)) + (flux_[3](i, j) - flux_[3](i, jp));
          if (raw_gradient) (*raw_gradient)(i, j) = g;
          const Scalar f = -g / w;
          if (rhs) (*rhs)(i, j) = f;
          buf_[4](i, j) = w * f * f;
          max_rhs = std::max(max_rhs, std::abs(f));
        }
      }
    }

    Result res;
    res.splay = reduce(0);
    res.twist = reduce(1);
    res.bend_intrinsic = reduce(2);
    res.bend_extrinsic = reduce(3);
    if (want_grad) {
      res.rhs_norm_sq = reduce(4);
      res.max_rhs = max_rhs;
    }
    return res;
  }

private:
  Scalar phi(int j) const { return Scalar(j) * rt_.d_phi; }

  void resize(int nt, int np, int count) {
    if (int(buf_.size()) < count) buf_.resize(count);
    for (int q = 0; q < count; ++q) buf_[q].resize(nt, np);
    rows_.resize(nt);
  }

  // Row-wise pairwise sums, replicated across the grid width when the
  // buffer holds a single representative column.
  Scalar reduce(int q) {
    const auto& b = buf_[q];
    const int nt = int(b.rows()), np = int(b.cols());
    for (int i = 0; i < nt; ++i)
      rows_[i] = np == grid_.n_phi ? pairwise_sum(&b(i, 0), std::size_t(np))
                                   : pairwise_sum_uniform(b(i, 0), std::size_t(grid_.n_phi));
    return pairwise_sum(rows_.data(), rows_.size());
  }

  RowTables<Scalar> rt_;
  Grid grid_;
  WindingNumber winding_;
  std::vector<Scalar> edge_weight_;
  std::vector<NodeArray<Scalar>> buf_;
  NodeArray<Scalar> flux_[4];
  NodeArray<Scalar> explicit_;
  std::vector<Scalar> rows_;
};

}  // namespace detail

/// Discrete W_NV for general constants (node quadrature of the four strain
/// densities; see detail::DiscreteEnergy for the stencil).
template <class Scalar>
EnergyBreakdown<Scalar> energy_general(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom,
                                       const ElasticConstants<Scalar>& k) {
  k.validate();
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  const auto r = de.nematic(field.deviation(), k);
  EnergyBreakdown<Scalar> out;
  out.model = EnergyModel::nematic;
  out.splay = r.splay;
  out.twist = r.twist;
  out.bend_intrinsic = r.bend_intrinsic;
  out.bend_extrinsic = r.bend_extrinsic;
  out.total = out.active_sum();
  return out;
}

/// One-constant energy f(mu) + (k/2) int |grad alpha|^2 + (c1^2 - c2^2)/2 cos 2 alpha.
template <class Scalar>
EnergyBreakdown<Scalar> energy_one_constant(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom,
                                            Scalar k) {
  ElasticConstants<Scalar>::one_constant(k).validate();
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  const auto r = de.one_constant(field.deviation(), k);
  EnergyBreakdown<Scalar> out;
  out.model = EnergyModel::one_constant;
  out.dirichlet = r.dirichlet;
  out.potential = r.potential;
  out.offset = k * one_constant_offset(geom.mu());
  out.total = out.active_sum();
  return out;
}

/// Classical one-constant energy: Dirichlet energy of alpha plus the exact
/// spin-connection term 2 k pi^2 (mu - sqrt(mu^2 - 1)).
template <class Scalar>
Scalar energy_classical(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom, Scalar k) {
  ElasticConstants<Scalar>::one_constant(k).validate();
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  const auto r = de.one_constant(field.deviation(), k);
  return r.dirichlet + k * classical_offset(geom.mu());
}

/// Per-node nematic energy density (energy per unit area); its area-weighted
/// sum is energy_general(...).total.
template <class Scalar>
NodeArray<Scalar> energy_density(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom,
                                 const ElasticConstants<Scalar>& k) {
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  NodeArray<Scalar> dens;
  de.nematic(field.deviation(), k, nullptr, &dens);
  return dens;
}

/// Exact gradient dE/du_ij of the discrete nematic energy.
template <class Scalar>
NodeArray<Scalar> energy_gradient(const AngleField<Scalar>& field, const TorusGeometry<Scalar>& geom,
                                  const ElasticConstants<Scalar>& k) {
  detail::DiscreteEnergy<Scalar> de(geom, field.grid(), field.winding());
  NodeArray<Scalar> g;
  de.nematic(field.deviation(), k, nullptr, nullptr, &g);
  return g;
}

}  // namespace nematorus

#endif
