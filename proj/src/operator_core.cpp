#include "btq/operator_core.hpp"
#include "btq/sphere_fn.hpp"

#include <random>
#include <string>

namespace btq {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b)
    throw PreconditionError(std::string(what) + ": dimension mismatch " + std::to_string(a) +
                            " vs " + std::to_string(b));
}

} // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m, double drift_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw PreconditionError("HermitianOperator: matrix not square");
  if (!m_.allFinite()) throw PreconditionError("HermitianOperator: non-finite entry");
  if (m_.size() == 0) return;
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double drift = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (drift > drift_tol * scale)
    throw PreconditionError("HermitianOperator: Hermiticity drift " + std::to_string(drift));
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const Eigen::VectorXd& d) {
  return HermitianOperator(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  require_same_dim(dim(), o.dim(), "operator +");
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  require_same_dim(dim(), o.dim(), "operator -");
  m_ -= o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }

ComplexMatrix operator*(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "operator product");
  return a.matrix() * b.matrix();
}

HermitianOperator jordan_product(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "jordan_product");
  const ComplexMatrix ab = a.matrix() * b.matrix();
  return HermitianOperator(0.5 * (ab + ab.adjoint()));
}

ComplexMatrix commutator(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "commutator");
  const ComplexMatrix ab = a.matrix() * b.matrix();
  return ab - ab.adjoint();
}

HermitianOperator i_commutator(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(Complex(0.0, -1.0) * commutator(a, b));
}

HermitianOperator square(const HermitianOperator& a) {
  return HermitianOperator(a.matrix() * a.matrix());
}

Spectrum spectrum(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double operator_norm(const HermitianOperator& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double min_eigenvalue(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "hs_inner");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

DensityState::DensityState(ComplexMatrix m, double tol) : m_(std::move(m)) {
  HermitianOperator h(m_, tol);
  m_ = h.matrix();
  if (std::abs(m_.trace().real() - 1.0) > tol || std::abs(m_.trace().imag()) > tol)
    throw PreconditionError("DensityState: trace must be one");
  if (min_eigenvalue(h) < -tol) throw PreconditionError("DensityState: negative eigenvalue");
}

DensityState DensityState::pure(const ComplexVector& v) {
  const ComplexVector u = v / v.norm();
  return DensityState(u * u.adjoint());
}

double expectation(const HermitianOperator& a, const DensityState& theta) {
  require_same_dim(a.dim(), theta.dim(), "expectation");
  return (a.matrix().array() * theta.matrix().transpose().array()).sum().real();
}

Complex expectation(const ComplexMatrix& a, const DensityState& theta) {
  require_same_dim(static_cast<int>(a.rows()), theta.dim(), "expectation");
  return (a.array() * theta.matrix().transpose().array()).sum();
}

DensityState random_density(int dim, std::uint64_t seed) {
  if (dim < 1) throw PreconditionError("random_density: dim must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix w(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) w(i, j) = Complex(normal(rng), normal(rng));
  ComplexMatrix rho = w * w.adjoint();
  rho /= rho.trace().real();
  return DensityState(0.5 * (rho + rho.adjoint()));
}

} // namespace btq
