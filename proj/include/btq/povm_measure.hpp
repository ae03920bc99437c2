#pragma once

// Finite-outcome POVMs, their Naimark dilation and the noise inequality.

#include "btq/operator_core.hpp"
#include "btq/quantization.hpp"

#include <span>
#include <vector>

namespace btq {

struct DiscretePOVM {
  int dim = 0;
  std::vector<HermitianOperator> elements;
  std::vector<SpherePoint> labels;  ///< empty when outcomes are abstract

  std::size_t size() const { return elements.size(); }
  /// sum_q u_q F_q.
  HermitianOperator integrate(std::span<const double> u) const;
};

/// Checks F_q >= -tol and sum F_q = I within tol.
void validate(const DiscretePOVM& p, double tol = 1e-10);

/// F_q = (k+1) w_q |x_q><x_q| over the quantizer's grid.
DiscretePOVM discretize_povm(const ToeplitzQuantizer& q);

struct NaimarkDilation {
  int dim = 0;
  int outcomes = 0;
  ComplexMatrix V;  ///< (dim * outcomes) x dim, block q is F_q^{1/2}

  /// Compression V^* S V of the block-diagonal observable S = diag(s_q I).
  HermitianOperator compress(std::span<const double> s) const;
  /// V^* S T V for two block-diagonal observables.
  HermitianOperator compress_product(std::span<const double> s, std::span<const double> t) const;
};

/// Block stack of square roots; eigenvalues in [-1e-12, 0) are clamped, anything more
/// negative is an error.
NaimarkDilation naimark_dilate(const DiscretePOVM& p);

/// q(S, T) = Pi S T Pi^* - (Pi S Pi^*)(Pi T Pi^*), Pi = V^*.
ComplexMatrix q_pairing(const NaimarkDilation& d, std::span<const double> s,
                        std::span<const double> t);

/// Delta_F(u) = sum u^2 F - (sum u F)^2.
HermitianOperator noise_operator_discrete(const DiscretePOVM& p, std::span<const double> u);

struct NoiseCheck {
  double lhs = 0.0;    ///< tr(Delta(u) theta) tr(Delta(v) theta)
  double rhs = 0.0;    ///< |tr([U, V] theta)|^2 / 4
  double slack() const { return lhs - rhs; }
};

NoiseCheck verify_noise_inequality(const DiscretePOVM& p, std::span<const double> u,
                                   std::span<const double> v, const DensityState& theta);

struct VarianceParts {
  double classical = 0.0;  ///< Var(f, mu_theta) through Husimi moments
  double quantum = 0.0;    ///< Var(Q(f), theta)
  double noise = 0.0;      ///< tr(Delta(f) theta)
  double residual() const { return std::abs(classical - quantum - noise); }
};

VarianceParts variance_identity_check(const Quantization& q, const SphereFunction& f,
                                      const DensityState& theta);

/// Var(A, theta) = tr(A^2 theta) - tr(A theta)^2.
double variance(const HermitianOperator& a, const DensityState& theta);

} // namespace btq
