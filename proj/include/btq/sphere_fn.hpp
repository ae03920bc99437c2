#pragma once

// Band-limited real functions on the two-sphere.
//
// Normalization used throughout the library:
//   * sigma is the normalized round area measure (total mass 1);
//   * the symplectic form is half the round area form, so Vol(S^2, omega) = 2 pi
//     and d mu = 2 pi d sigma;
//   * the Riemannian metric g_p is half the round metric, so the positive
//     Laplace-Beltrami operator has eigenvalue 2 l (l + 1) on degree-l harmonics.
//
// Functions are stored as coefficients over real spherical harmonics that are
// orthonormal with respect to sigma (Y_00 = 1, Y_10 = sqrt(3) z).

#include <Eigen/Dense>

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace btq {

/// Raised when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace convention {

inline constexpr double kTotalArea = 2.0 * std::numbers::pi;

constexpr double laplace_eigenvalue(int l) { return 2.0 * l * (l + 1); }

} // namespace convention

struct SpherePoint {
  double theta = 0.0; ///< colatitude in [0, pi]
  double phi = 0.0;   ///< longitude in [0, 2 pi)

  static SpherePoint from_ambient(const Eigen::Vector3d& p);
  Eigen::Vector3d ambient() const;
  /// Round-unit tangent vectors; well defined at the poles given phi.
  Eigen::Vector3d e_theta() const;
  Eigen::Vector3d e_phi() const;
};

/// Product rule: Gauss-Legendre in cos(theta) times equispaced longitudes.
/// Integrates every spherical polynomial of degree <= exact_degree() exactly.
class QuadratureGrid {
public:
  explicit QuadratureGrid(int min_exact_degree);

  int exact_degree() const { return degree_; }
  int num_rings() const { return static_cast<int>(ring_z_.size()); }
  int num_azimuths() const { return n_phi_; }
  std::size_t size() const { return ring_z_.size() * static_cast<std::size_t>(n_phi_); }

  double ring_z(int i) const { return ring_z_[i]; }
  double ring_sin(int i) const { return ring_s_[i]; }
  /// Ring weights sum to one.
  double ring_weight(int i) const { return ring_w_[i]; }
  double azimuth(int j) const;

  /// Nodes are stored ring-major: q = i * num_azimuths() + j.
  double weight(std::size_t q) const { return ring_w_[q / n_phi_] / n_phi_; }
  SpherePoint node(std::size_t q) const;
  std::vector<SpherePoint> nodes() const;

  bool operator==(const QuadratureGrid& other) const { return degree_ == other.degree_; }

private:
  int degree_;
  int n_phi_;
  std::vector<double> ring_z_;
  std::vector<double> ring_s_;
  std::vector<double> ring_w_;
};

QuadratureGrid build_grid(int min_exact_degree);

/// Shared immutable grid of the given degree; thread-safe.
const QuadratureGrid& cached_grid(int exact_degree);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

class SphereFunction {
public:
  SphereFunction() : SphereFunction(0) {}
  explicit SphereFunction(int band_limit);
  SphereFunction(int band_limit, std::vector<double> coeffs);

  static SphereFunction constant(double value);
  /// Ambient coordinate x (axis 0), y (axis 1) or z (axis 2).
  static SphereFunction coordinate(int axis);
  static SphereFunction harmonic(int l, int m, double scale = 1.0);

  static constexpr int index(int l, int m) { return l * l + l + m; }
  static constexpr int count(int band_limit) { return (band_limit + 1) * (band_limit + 1); }

  int band_limit() const { return band_; }
  double coeff(int l, int m) const;
  double& coeff(int l, int m);
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  /// Integral against sigma.
  double mean() const { return coeffs_[0]; }
  double l2_norm_squared() const;

  /// Drops harmonics above the given degree; never called implicitly.
  SphereFunction truncated(int band_limit) const;
  SphereFunction padded(int band_limit) const;
  /// Smallest band limit whose coefficients above it are all below tol.
  int effective_band(double tol = 0.0) const;

  SphereFunction& operator+=(const SphereFunction& other);
  SphereFunction& operator-=(const SphereFunction& other);
  SphereFunction& operator*=(double s);

private:
  int band_;
  std::vector<double> coeffs_;
};

SphereFunction operator+(SphereFunction a, const SphereFunction& b);
SphereFunction operator-(SphereFunction a, const SphereFunction& b);
SphereFunction operator*(double s, SphereFunction f);
SphereFunction operator*(SphereFunction f, double s);
SphereFunction operator-(SphereFunction f);

/// Largest absolute coefficient difference.
double coeff_distance(const SphereFunction& a, const SphereFunction& b);

double evaluate(const SphereFunction& f, const SpherePoint& p);
double evaluate(const SphereFunction& f, const Eigen::Vector3d& p);
/// Evaluates several functions at one point sharing the Legendre table.
void evaluate_many(std::span<const SphereFunction> fs, const Eigen::Vector3d& p,
                   std::span<double> out);

/// Values at every grid node, ring-major.
std::vector<double> synthesize(const SphereFunction& f, const QuadratureGrid& grid);

/// Values on an arbitrary set of colatitude rings with n_phi equispaced longitudes.
std::vector<double> synthesize_rings(const SphereFunction& f, std::span<const double> thetas,
                                     int n_phi);

struct GridDerivatives {
  std::vector<double> value;
  std::vector<double> d_theta;
  std::vector<double> d_phi;           ///< partial derivative in longitude
  std::vector<double> d_phi_over_sin;  ///< regular at the poles
};

/// Pointwise theta/phi derivatives at grid nodes (independent of the Laplacian route).
GridDerivatives derivatives_on_grid(const SphereFunction& f, const QuadratureGrid& grid);

/// Coefficients <samples, Y_lm>_sigma; exact for inputs band-limited to `band`.
SphereFunction project(std::span<const double> samples, const QuadratureGrid& grid, int band);

SphereFunction multiply(const SphereFunction& f, const SphereFunction& g);
SphereFunction laplacian(const SphereFunction& f);
SphereFunction heat_flow(const SphereFunction& f, double s);
/// g_p gradient pairing via 1/2 (f lap g + g lap f - lap(f g)).
SphereFunction grad_pairing(const SphereFunction& f, const SphereFunction& g);
SphereFunction poisson_bracket(const SphereFunction& f, const SphereFunction& g);
/// P_n(z) as a function on the sphere.
SphereFunction legendre(int n);
/// Rotational derivative along the longitude: d f / d phi.
SphereFunction d_phi(const SphereFunction& f);

/// f composed with the inverse rotation, i.e. x -> f(R^{-1} x).
SphereFunction rotate(const SphereFunction& f, const Eigen::Matrix3d& rotation);

/// g_p gradient at p, as an ambient tangent vector.
Eigen::Vector3d gradient_at(const SphereFunction& f, const SpherePoint& p);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  double sup_abs() const { return std::max(-min, max); }
};

/// Min and max over an equiangular lattice that includes both poles.
Extrema sample_extrema(const SphereFunction& f, int resolution = 0);
double sup_norm(const SphereFunction& f, int resolution = 0);

/// Parses "1", "x", "y", "z", "P<n>", "Y<l>,<m>" and products joined by '*'.
SphereFunction parse_function(const std::string& spec);

} // namespace btq
