#pragma once

// Level-k Berezin-Toeplitz quantization of the sphere via spin coherent states.
//
// H_k = C^{k+1}; basis vector m (0 <= m <= k) has J_z eigenvalue k/2 - m.
// hbar = 1/k throughout.

#include "btq/operator_core.hpp"
#include "btq/sphere_fn.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace btq {

/// Components sqrt(C(k,m)) cos(theta/2)^{k-m} (sin(theta/2) e^{i phi})^m.
ComplexVector coherent_state(int k, const SpherePoint& p);

class ToeplitzQuantizer;

/// Any quantization map f -> Q(f) on the level-k space built on a Toeplitz base.
class Quantization {
public:
  virtual ~Quantization() = default;

  virtual int level() const = 0;
  virtual const ToeplitzQuantizer& base() const = 0;
  virtual HermitianOperator quantize(const SphereFunction& f) const = 0;
  /// Batch form; smeared quantizers share their per-node work across functions.
  virtual std::vector<HermitianOperator> quantize_all(std::span<const SphereFunction> fs) const;
  /// True when f >= 0 always gives Q(f) >= 0, i.e. the map comes from a POVM.
  virtual bool preserves_positivity() const = 0;
  virtual std::string describe() const = 0;

  double hbar() const { return 1.0 / level(); }
  int dim() const { return level() + 1; }
  /// Largest band limit accepted by quantize().
  int symbol_budget() const;
};

using QuantizationPtr = std::shared_ptr<const Quantization>;

class ToeplitzQuantizer final : public Quantization {
public:
  /// Quadrature degree k + 2 * symbol_band, so symbols up to band 2 * symbol_band are
  /// integrated exactly (a product of two band-symbol_band functions fits).
  ToeplitzQuantizer(int k, int symbol_band = 8);

  int level() const override { return k_; }
  const ToeplitzQuantizer& base() const override { return *this; }
  HermitianOperator quantize(const SphereFunction& f) const override { return toeplitz(f); }
  bool preserves_positivity() const override { return true; }
  std::string describe() const override { return "standard"; }

  int symbol_band() const { return symbol_band_; }
  int budget() const { return grid_.exact_degree() - k_; }
  const QuadratureGrid& grid() const { return grid_; }
  /// Coherent amplitudes |c_m| on ring i (real, non-negative).
  std::span<const double> ring_amplitudes(int ring) const;
  ComplexVector coherent(std::size_t node) const;

  /// (k+1) sum_q w_q f(x_q) |x_q><x_q|.
  HermitianOperator toeplitz(const SphereFunction& f) const;
  /// Same sum for arbitrary node samples (ring-major, one value per grid node).
  HermitianOperator toeplitz_samples(std::span<const double> samples) const;

  /// x -> <x|A|x> as a band-k function; exact, since coherent matrix elements have degree <= k.
  SphereFunction dequantize(const HermitianOperator& a) const;
  /// Real and imaginary parts of x -> <x|A|x> for a general matrix.
  std::pair<SphereFunction, SphereFunction> dequantize(const ComplexMatrix& a) const;
  Complex dequantize_at(const ComplexMatrix& a, const SpherePoint& p) const;
  /// The dual map with its factor n = k + 1.
  SphereFunction dual(const HermitianOperator& a) const { return double(k_ + 1) * dequantize(a); }

  SphereFunction berezin(const SphereFunction& f) const { return dequantize(toeplitz(f)); }

private:
  int k_;
  int symbol_band_;
  QuadratureGrid grid_;
  std::vector<double> amplitudes_;  // ring-major, k+1 per ring
  std::vector<double> deq_amplitudes_;  // on the degree-2k dequantization rings
};

// ---------------------------------------------------------------------------
// Spin representation

/// J_x, J_y, J_z in the coherent basis; T(u_i) = J_i / (k/2 + 1).
std::array<HermitianOperator, 3> spin_generators(int k);
/// exp(-i angle n.J), the lift of the rotation by `angle` about unit axis n.
ComplexMatrix spin_rotation(int k, const Eigen::Vector3d& axis, double angle);

// ---------------------------------------------------------------------------
// Derived quantities

double husimi_moment(const Quantization& q, const SphereFunction& f, const DensityState& theta);
/// Q(f^2) - Q(f)^2.
HermitianOperator noise_operator(const Quantization& q, const SphereFunction& f);

struct RawnsleyResult {
  SphereFunction density;  ///< R_hbar: tr Q(f) = k * integral of f R_hbar d sigma
  SphereFunction r;        ///< (R_hbar - 1) / hbar
  double mean_r = 0.0;     ///< integral of r d sigma
};

/// Recovers R_hbar from traces over the orthonormal probes Y_lm, l <= probe_band.
RawnsleyResult rawnsley_function(const Quantization& q, int probe_band);

struct ComplexFunction {
  SphereFunction re;
  SphereFunction im;
};

/// Factory returning the quantization at level k.
using QuantizationFamily = std::function<QuantizationPtr(int k)>;
/// Candidate first-order term c(f, g) of the product expansion.
using CocycleCandidate = ComplexFunction;

struct ConvergenceRecord {
  std::vector<int> ks;
  std::vector<std::array<double, 5>> residuals;  ///< r1..r5 per k
  std::array<double, 5> slopes{};                ///< -d log r / d log k
};

/// Residuals of the five axioms at each level and their fitted decay orders.
ConvergenceRecord axiom_report(const QuantizationFamily& family, std::span<const int> ks,
                               const SphereFunction& f, const SphereFunction& g,
                               const CocycleCandidate& c);

/// Least-squares slope of -log r against log k; residuals below `floor` are clamped.
double fitted_order(std::span<const int> ks, std::span<const double> r, double floor = 1e-15);

double sup_abs(const ComplexFunction& c, int resolution = 0);

} // namespace btq
