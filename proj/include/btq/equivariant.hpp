#pragma once

// SU(2)-equivariant quantizations as multipliers on the degree-l harmonics, and
// their classification against the heat-smeared family.

#include "btq/quantization.hpp"

#include <span>
#include <string>
#include <vector>

namespace btq {

struct EquivariantQuantization {
  int k = 0;
  std::vector<double> multipliers;      ///< m_l, l = 0..L
  std::vector<double> schur_residuals;  ///< max_m |Q(Y_lm) - m_l T(Y_lm)| / |T(Y_lm)|

  double alpha(int l) const { return multipliers.at(l) - 1.0; }
};

/// Largest relative defect |Q(f o R^-1) - U Q(f) U^*| / |Q(f)| over rotations about the axes.
double equivariance_defect(const Quantization& q);

/// Hilbert-Schmidt projections m_l = <Q(Y_l0), T(Y_l0)> / <T(Y_l0), T(Y_l0)>.
/// Throws if the equivariance defect exceeds `tol`. max_l < 0 means min(k, budget).
EquivariantQuantization extract_multipliers(const Quantization& q, int max_l = -1,
                                            double tol = 1e-8);

/// Q(f) = sum_l m_l T(f_l) for prescribed multipliers.
class MultiplierQuantizer final : public Quantization {
public:
  MultiplierQuantizer(std::shared_ptr<const ToeplitzQuantizer> base, std::vector<double> m);
  int level() const override { return base_->level(); }
  const ToeplitzQuantizer& base() const override { return *base_; }
  HermitianOperator quantize(const SphereFunction& f) const override;
  bool preserves_positivity() const override { return false; }
  std::string describe() const override { return "multipliers"; }

private:
  std::shared_ptr<const ToeplitzQuantizer> base_;
  std::vector<double> m_;
};

struct LegendreResidual {
  double product = 0.0;   ///< sup |P1 Pn - q_n P_{n+1} - r_n P_{n-1}|
  double gradient = 0.0;  ///< sup |(grad P1, grad Pn) - s_n (P_{n-1} - P_{n+1})|
};

LegendreResidual legendre_identity_check(int n);

struct MuFit {
  double mu = 1.0;
  double fit_residual = 0.0;                 ///< max over n of the model misfit
  std::vector<double> recursion_residuals;   ///< per level, max_n of the recursion misfit
};

/// Least squares for alpha_n = -n(n+1)(mu - 1) hbar / 2 over 1 <= n <= n_max, after
/// removing the O(hbar^2) term by Richardson extrapolation on the two largest levels.
MuFit fit_mu(std::span<const EquivariantQuantization> levels, int n_max = 6);

/// Single-level fit of mu with an extra hbar^2 n^2 (n+1)^2 term (no extrapolation).
double level_mu(const EquivariantQuantization& e, int n_max = 6);

struct EquivalenceRow {
  int k = 0;
  double t_level = 0.0;   ///< (level_mu - 1) / 4 at this level
  double residual = 0.0;  ///< max over test functions of |Q(f) - T^{(t_level)}(f)|
};

struct ClassificationReport {
  double mu = 1.0;
  double t = 0.0;
  bool povm = true;
  double exponent = 0.0;  ///< decay order of the equivalence residual (inf if all vanish)
  std::string verdict;
  std::vector<EquivalenceRow> rows;
  std::vector<EquivariantQuantization> levels;
  MuFit fit;
};

struct ClassifyOptions {
  int n_max = 6;
  double mu_tol = 0.05;         ///< mu < 1 - mu_tol is non-POVM
  double exponent_min = 1.8;
  double zero_residual = 1e-10;
  double equivariance_tol = 1e-8;
};

ClassificationReport classify(const QuantizationFamily& family, std::span<const int> ks,
                              const ClassifyOptions& options = {});

std::string format_report(const ClassificationReport& r);

} // namespace btq
