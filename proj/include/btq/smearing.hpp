#pragma once

// Quantizations derived from the Toeplitz base by pre-composing a map on symbols:
// heat smearing, the metaplectic correction, vector-field twists and the
// anisotropic Gaussian Markov kernel.

#include "btq/quantization.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <string>

namespace btq {

using ToeplitzPtr = std::shared_ptr<const ToeplitzQuantizer>;

/// T(e^{-t hbar Lap} f).
class HeatQuantizer final : public Quantization {
public:
  HeatQuantizer(ToeplitzPtr base, double t);
  int level() const override { return base_->level(); }
  const ToeplitzQuantizer& base() const override { return *base_; }
  HermitianOperator quantize(const SphereFunction& f) const override;
  bool preserves_positivity() const override { return true; }
  std::string describe() const override;
  double t() const { return t_; }

private:
  ToeplitzPtr base_;
  double t_;
};

/// T(f + (hbar / 4) Lap f); not positivity preserving.
class MetaplecticQuantizer final : public Quantization {
public:
  explicit MetaplecticQuantizer(ToeplitzPtr base);
  int level() const override { return base_->level(); }
  const ToeplitzQuantizer& base() const override { return *base_; }
  HermitianOperator quantize(const SphereFunction& f) const override;
  bool preserves_positivity() const override { return false; }
  std::string describe() const override { return "metaplectic"; }

private:
  ToeplitzPtr base_;
};

/// v = a x p + grad_p h: a rotation field plus an optional g_p gradient field.
struct VectorField {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();
  std::optional<SphereFunction> potential;

  Eigen::Vector3d at(const Eigen::Vector3d& p) const;
  /// Divergence with respect to the area form: -Lap h.
  SphereFunction divergence() const;
  bool is_rotation() const { return !potential.has_value(); }
};

/// Time-s flow of v; closed form for rotations, RK4 with `steps` steps otherwise.
Eigen::Vector3d flow(const VectorField& v, const Eigen::Vector3d& p, double s, int steps = 8);

/// T(f o phi_{-hbar}).
class TwistQuantizer final : public Quantization {
public:
  TwistQuantizer(ToeplitzPtr base, VectorField v);
  int level() const override { return base_->level(); }
  const ToeplitzQuantizer& base() const override { return *base_; }
  HermitianOperator quantize(const SphereFunction& f) const override;
  std::vector<HermitianOperator> quantize_all(std::span<const SphereFunction> fs) const override;
  bool preserves_positivity() const override { return true; }
  std::string describe() const override { return "twist"; }

private:
  ToeplitzPtr base_;
  VectorField v_;
  Eigen::Matrix3d rotation_;        // used when v is a rotation field
  std::vector<Eigen::Vector3d> pulled_;  // phi_{-hbar}(x_q) otherwise
};

/// rho as a 2x2 symmetric matrix in the g_p-orthonormal frame (sqrt2 e_theta, sqrt2 e_phi).
class RhoField {
public:
  using Fn = std::function<Eigen::Matrix2d(const SpherePoint&)>;
  RhoField(Fn fn, std::string label);

  static RhoField zero();
  /// s g_p.
  static RhoField iso(double s);
  /// s (dz restricted to the sphere)^2 in the metric g_p: diag(2 s sin^2 theta, 0).
  static RhoField zz(double s);
  /// Rows theta, phi, r11, r12, r22; evaluated at the nearest tabulated point.
  static RhoField from_csv(const std::string& path);

  /// Throws if rho < -1e-12.
  Eigen::Matrix2d operator()(const SpherePoint& p) const;
  const std::string& label() const { return label_; }

private:
  Fn fn_;
  std::string label_;
};

struct MarkovOptions {
  double epsilon = std::numbers::pi / 4;  ///< cutoff radius in round distance
  int gh_order = 20;                      ///< Gauss-Hermite nodes per axis
};

/// Smooth bump: 1 on [0, eps/2], 0 on [eps, inf).
double cutoff(double r, double epsilon);

struct KernelSample {
  Eigen::Vector3d point;
  double weight;
};

/// Normalized quadrature for f -> K_t^rho f (x0); weights sum to one.
std::vector<KernelSample> markov_kernel(const SpherePoint& x0, const Eigen::Matrix2d& rho, double t,
                                        const MarkovOptions& options = {});

/// K_t^rho f at arbitrary points.
std::vector<double> markov_smear_samples(const SphereFunction& f, const RhoField& rho, double t,
                                         std::span<const SpherePoint> points,
                                         const MarkovOptions& options = {});

/// K_t^rho f projected to the given band.
SphereFunction markov_smear_apply(const SphereFunction& f, const RhoField& rho, double t, int band,
                                  const MarkovOptions& options = {});

/// T(K_t^rho f), with K applied at the quantizer nodes; t defaults to hbar.
class MarkovQuantizer final : public Quantization {
public:
  MarkovQuantizer(ToeplitzPtr base, RhoField rho, std::optional<double> t = std::nullopt,
                  MarkovOptions options = {});
  int level() const override { return base_->level(); }
  const ToeplitzQuantizer& base() const override { return *base_; }
  HermitianOperator quantize(const SphereFunction& f) const override;
  std::vector<HermitianOperator> quantize_all(std::span<const SphereFunction> fs) const override;
  bool preserves_positivity() const override { return true; }
  std::string describe() const override { return "markov:" + rho_.label(); }
  double t() const { return t_; }

private:
  ToeplitzPtr base_;
  RhoField rho_;
  double t_;
  MarkovOptions options_;
};

struct PositivityWitness {
  std::string function;
  double min_symbol = 0.0;      ///< min of f over a dense lattice (>= 0)
  double min_eigenvalue = 0.0;  ///< min eigenvalue of Q(f)
};

/// Scans non-negative low-degree symbols ((1 + z)/2)^p and (1 +- P_n)/2 for the most
/// negative Q(f).
PositivityWitness positivity_witness(const Quantization& q, int max_degree = 6);

} // namespace btq
