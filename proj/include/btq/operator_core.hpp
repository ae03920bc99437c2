#pragma once

// Dense Hermitian operators on the level-k Hilbert space C^{k+1}.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace btq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

class HermitianOperator {
public:
  HermitianOperator() = default;
  /// Symmetrizes m; throws if it is further than drift_tol (relative) from Hermitian.
  explicit HermitianOperator(ComplexMatrix m, double drift_tol = 1e-10);

  static HermitianOperator identity(int dim);
  static HermitianOperator zero(int dim);
  static HermitianOperator diagonal(const Eigen::VectorXd& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator& operator*=(double s);

private:
  ComplexMatrix m_;
};

HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b);
HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b);
HermitianOperator operator*(double s, HermitianOperator a);

/// Plain matrix product, not Hermitian in general.
ComplexMatrix operator*(const HermitianOperator& a, const HermitianOperator& b);

HermitianOperator jordan_product(const HermitianOperator& a, const HermitianOperator& b);
/// AB - BA (anti-Hermitian).
ComplexMatrix commutator(const HermitianOperator& a, const HermitianOperator& b);
/// -i [A, B], which is Hermitian.
HermitianOperator i_commutator(const HermitianOperator& a, const HermitianOperator& b);
/// A^2 as a Hermitian operator.
HermitianOperator square(const HermitianOperator& a);

struct Spectrum {
  Eigen::VectorXd values;  ///< ascending
  ComplexMatrix vectors;   ///< columns are eigenvectors
};

Spectrum spectrum(const HermitianOperator& a);
double operator_norm(const HermitianOperator& a);
/// Largest singular value of an arbitrary square matrix.
double operator_norm(const ComplexMatrix& a);
double min_eigenvalue(const HermitianOperator& a);

/// Re tr(A B), the Hilbert-Schmidt pairing of Hermitian operators.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

class DensityState {
public:
  DensityState() = default;
  explicit DensityState(ComplexMatrix m, double tol = 1e-10);
  static DensityState pure(const ComplexVector& v);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

private:
  ComplexMatrix m_;
};

/// tr(A theta).
double expectation(const HermitianOperator& a, const DensityState& theta);
Complex expectation(const ComplexMatrix& a, const DensityState& theta);

/// Wishart-type state W W^* / tr, with W a complex Gaussian dim x dim matrix.
DensityState random_density(int dim, std::uint64_t seed);

} // namespace btq
