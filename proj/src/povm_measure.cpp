#include "btq/povm_measure.hpp"

#include <string>

namespace btq {

namespace {

void require_outcomes(const DiscretePOVM& p, std::size_t n, const char* what) {
  if (n != p.size())
    throw PreconditionError(std::string(what) + ": expected one value per outcome");
}

} // namespace

HermitianOperator DiscretePOVM::integrate(std::span<const double> u) const {
  require_outcomes(*this, u.size(), "integrate");
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (std::size_t q = 0; q < elements.size(); ++q) s += u[q] * elements[q].matrix();
  return HermitianOperator(std::move(s));
}

void validate(const DiscretePOVM& p, double tol) {
  ComplexMatrix sum = ComplexMatrix::Zero(p.dim, p.dim);
  for (std::size_t q = 0; q < p.size(); ++q) {
    if (min_eigenvalue(p.elements[q]) < -tol)
      throw PreconditionError("POVM element " + std::to_string(q) + " is not positive");
    sum += p.elements[q].matrix();
  }
  if ((sum - ComplexMatrix::Identity(p.dim, p.dim)).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("POVM elements do not sum to the identity");
}

DiscretePOVM discretize_povm(const ToeplitzQuantizer& q) {
  DiscretePOVM p;
  p.dim = q.dim();
  const auto& grid = q.grid();
  p.elements.reserve(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const ComplexVector c = q.coherent(node);
    p.elements.emplace_back((q.dim() * grid.weight(node)) * (c * c.adjoint()));
  }
  p.labels = grid.nodes();
  return p;
}

NaimarkDilation naimark_dilate(const DiscretePOVM& p) {
  NaimarkDilation d;
  d.dim = p.dim;
  d.outcomes = static_cast<int>(p.size());
  d.V = ComplexMatrix::Zero(std::size_t(p.dim) * p.size(), p.dim);
  for (std::size_t q = 0; q < p.size(); ++q) {
    Spectrum s = spectrum(p.elements[q]);
    for (int i = 0; i < s.values.size(); ++i) {
      if (s.values(i) < -1e-12)
        throw PreconditionError("naimark_dilate: element " + std::to_string(q) +
                                " has a negative eigenvalue");
      s.values(i) = std::sqrt(std::max(0.0, s.values(i)));
    }
    d.V.block(q * p.dim, 0, p.dim, p.dim) =
        s.vectors * s.values.cast<Complex>().asDiagonal() * s.vectors.adjoint();
  }
  return d;
}

HermitianOperator NaimarkDilation::compress(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != outcomes)
    throw PreconditionError("compress: expected one value per outcome");
  ComplexMatrix sv = V;
  for (int q = 0; q < outcomes; ++q) sv.middleRows(std::size_t(q) * dim, dim) *= s[q];
  return HermitianOperator(V.adjoint() * sv);
}

HermitianOperator NaimarkDilation::compress_product(std::span<const double> s,
                                                    std::span<const double> t) const {
  if (static_cast<int>(s.size()) != outcomes || static_cast<int>(t.size()) != outcomes)
    throw PreconditionError("compress_product: expected one value per outcome");
  std::vector<double> st(s.size());
  for (std::size_t q = 0; q < s.size(); ++q) st[q] = s[q] * t[q];
  return compress(st);
}

ComplexMatrix q_pairing(const NaimarkDilation& d, std::span<const double> s,
                        std::span<const double> t) {
  const HermitianOperator ps = d.compress(s);
  const HermitianOperator pt = d.compress(t);
  return d.compress_product(s, t).matrix() - ps.matrix() * pt.matrix();
}

HermitianOperator noise_operator_discrete(const DiscretePOVM& p, std::span<const double> u) {
  require_outcomes(p, u.size(), "noise_operator_discrete");
  std::vector<double> uu(u.size());
  for (std::size_t q = 0; q < u.size(); ++q) uu[q] = u[q] * u[q];
  return p.integrate(uu) - square(p.integrate(u));
}

NoiseCheck verify_noise_inequality(const DiscretePOVM& p, std::span<const double> u,
                                   std::span<const double> v, const DensityState& theta) {
  if (theta.dim() != p.dim) throw PreconditionError("verify_noise_inequality: dimension mismatch");
  const HermitianOperator uo = p.integrate(u);
  const HermitianOperator vo = p.integrate(v);
  NoiseCheck out;
  out.lhs = expectation(noise_operator_discrete(p, u), theta) *
            expectation(noise_operator_discrete(p, v), theta);
  out.rhs = 0.25 * std::norm(expectation(commutator(uo, vo), theta));
  return out;
}

double variance(const HermitianOperator& a, const DensityState& theta) {
  const double m = expectation(a, theta);
  return expectation(square(a), theta) - m * m;
}

VarianceParts variance_identity_check(const Quantization& q, const SphereFunction& f,
                                      const DensityState& theta) {
  const SphereFunction fs[] = {f, multiply(f, f)};
  const auto ops = q.quantize_all(fs);
  VarianceParts v;
  const double m1 = expectation(ops[0], theta);
  v.classical = expectation(ops[1], theta) - m1 * m1;
  v.quantum = variance(ops[0], theta);
  v.noise = expectation(ops[1] - square(ops[0]), theta);
  return v;
}

} // namespace btq
