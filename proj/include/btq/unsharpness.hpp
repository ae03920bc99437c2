#pragma once

// Unsharpness cocycle extraction, the unsharpness metric G and its splitting
// G = omega(., J .) + rho.
//
// Tangent data is expressed in the g_p-orthonormal frame (sqrt2 e_theta, sqrt2 e_phi),
// where omega has matrix [[0, -1], [1, 0]].

#include "btq/quantization.hpp"

#include <functional>
#include <vector>

namespace btq {

struct CocycleEstimate {
  int k = 0;
  SphereFunction plus;   ///< c_+ (symmetric, from the Jordan product)
  SphereFunction minus;  ///< c_- / i (antisymmetric, from the commutator)

  ComplexFunction full() const { return {plus, minus}; }
};

/// c ~ k <x| Q(f) Q(g) - Q(fg) |x>, split into Jordan and commutator parts.
CocycleEstimate cocycle_estimate(const Quantization& q, const SphereFunction& f,
                                 const SphereFunction& g);

/// Richardson step 2 c_{2k} - c_k.
SphereFunction cocycle_extrapolate(const SphereFunction& c_k, const SphereFunction& c_2k);
CocycleEstimate cocycle_extrapolate(const CocycleEstimate& at_k, const CocycleEstimate& at_2k);

/// -1/2 (grad f, grad g) + (i/2) {f, g}.
ComplexFunction standard_cocycle(const SphereFunction& f, const SphereFunction& g);

using CocycleFn = std::function<ComplexFunction(const SphereFunction&, const SphereFunction&)>;
using SymmetricCocycleFn =
    std::function<SphereFunction(const SphereFunction&, const SphereFunction&)>;

/// sup | f1 c(f2,f3) - c(f1 f2, f3) + c(f1, f2 f3) - c(f1, f2) f3 |.
double hochschild_residual(const CocycleFn& c, const SphereFunction& f1, const SphereFunction& f2,
                           const SphereFunction& f3);
/// sup | c+(fg, h) - f c+(g, h) - g c+(f, h) |.
double leibniz_residual(const SymmetricCocycleFn& c_plus, const SphereFunction& f,
                        const SphereFunction& g, const SphereFunction& h);

struct MetricField {
  std::vector<SpherePoint> points;
  std::vector<double> weights;  ///< quadrature weights against sigma
  std::vector<Eigen::Matrix2d> G;
};

struct MetricOptions {
  int report_degree = 24;                                     ///< quadrature degree of the point set
  Eigen::Matrix3d probe_rotation = Eigen::Matrix3d::Identity();  ///< probes (P x, P y, P z)
};

/// Tangent metric from the Gram matrix M_ij = G(sgrad u_i, sgrad u_j) of the probes.
Eigen::Matrix2d tangent_metric(const Eigen::Matrix3d& gram, const SpherePoint& p,
                               const Eigen::Matrix3d& probe_rotation = Eigen::Matrix3d::Identity());

/// G from the extrapolated cocycle of the pair (q_k, q_2k) via M_ij = -2 c_+(u_i, u_j).
MetricField metric_reconstruct(const Quantization& q_k, const Quantization& q_2k,
                               const MetricOptions& options = {});

/// Builds a field on the report grid from an analytic metric.
MetricField metric_on_grid(const std::function<Eigen::Matrix2d(const SpherePoint&)>& metric,
                           int report_degree = 24);

/// omega in the g_p-orthonormal frame.
Eigen::Matrix2d omega_matrix();

struct PointDecomposition {
  Eigen::Matrix2d K;    ///< G = omega(., K .)
  Eigen::Matrix2d J;    ///< K / sqrt(det K), J^2 = -1
  Eigen::Matrix2d rho;  ///< G - omega(., J .)
  double alpha = 0.0;   ///< sqrt(det G); K has eigenvalues +-i alpha
};

PointDecomposition decompose_point(const Eigen::Matrix2d& G);

struct MetricDecomposition {
  std::vector<PointDecomposition> points;
  double min_rho_eigenvalue = 0.0;
};

/// Throws naming the first grid point where G is not positive definite.
MetricDecomposition metric_decompose(const MetricField& field);

/// Volume of the sphere in G, i.e. 2 pi * integral sqrt(det G) d sigma.
double total_unsharpness(const MetricField& field);

} // namespace btq
