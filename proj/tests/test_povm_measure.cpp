#include "btq/povm_measure.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace btq;

namespace {

std::vector<double> gaussian_values(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

} // namespace

TEST_CASE("discretized Toeplitz POVM is positive and sums to the identity") {
  for (int k : {1, 4, 16}) {
    const ToeplitzQuantizer q(k);
    const DiscretePOVM p = discretize_povm(q);
    CHECK(p.size() == q.grid().size());
    CHECK_NOTHROW(validate(p, 1e-12));
    for (const auto& f : p.elements) CHECK(min_eigenvalue(f) >= -1e-14);
  }
}

TEST_CASE("integrating grid samples reproduces the Toeplitz operator") {
  std::mt19937_64 rng(41);
  const ToeplitzQuantizer q(7);
  const auto f = btq::testing::random_function(rng, 5);
  const DiscretePOVM p = discretize_povm(q);
  const auto samples = synthesize(f, q.grid());
  CHECK((p.integrate(samples).matrix() - q.toeplitz(f).matrix()).norm() < 1e-12);
}

TEST_CASE("validate rejects a non-normalized family") {
  DiscretePOVM p;
  p.dim = 2;
  p.elements = {HermitianOperator::identity(2), HermitianOperator::identity(2)};
  CHECK_THROWS_AS(validate(p), PreconditionError);
}

TEST_CASE("Naimark dilation is an isometry that compresses to the POVM") {
  std::mt19937_64 rng(42);
  const ToeplitzQuantizer q(3);
  const DiscretePOVM p = discretize_povm(q);
  const NaimarkDilation d = naimark_dilate(p);
  CHECK((d.V.adjoint() * d.V - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);
  const auto u = gaussian_values(rng, p.size()), v = gaussian_values(rng, p.size());
  CHECK((d.compress(u).matrix() - p.integrate(u).matrix()).norm() < 1e-12);
  std::vector<double> uv(u.size()), uu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv[i] = u[i] * v[i];
    uu[i] = u[i] * u[i];
  }
  CHECK((d.compress_product(u, v).matrix() - p.integrate(uv).matrix()).norm() < 1e-12);
  // q(u, u) is the noise operator.
  CHECK((q_pairing(d, u, u) - noise_operator_discrete(p, u).matrix()).norm() < 1e-12);
  const auto direct = p.integrate(uu) - square(p.integrate(u));
  CHECK((noise_operator_discrete(p, u).matrix() - direct.matrix()).norm() < 1e-12);
}

TEST_CASE("noise inequality holds for random outcomes and states") {
  std::mt19937_64 rng(43);
  for (int k : {2, 4, 8}) {
    const ToeplitzQuantizer q(k);
    const DiscretePOVM p = discretize_povm(q);
    const NaimarkDilation d = naimark_dilate(p);
    for (int trial = 0; trial < 100; ++trial) {
      const auto u = gaussian_values(rng, p.size()), v = gaussian_values(rng, p.size());
      const auto theta = random_density(k + 1, rng());
      const auto nc = verify_noise_inequality(p, u, v, theta);
      CHECK(nc.slack() >= -1e-10);
      // Independent right-hand side: |tr([U, V] theta)|^2 / 4.
      const ComplexMatrix comm = commutator(p.integrate(u), p.integrate(v));
      CHECK(nc.rhs == doctest::Approx(0.25 * std::norm(expectation(comm, theta))).epsilon(1e-10).scale(1.0));
      // Cauchy-Schwarz for the q-pairing.
      const double ss = expectation(q_pairing(d, u, u), theta).real();
      const double tt = expectation(q_pairing(d, v, v), theta).real();
      CHECK(ss * tt - std::norm(expectation(q_pairing(d, u, v), theta)) >= -1e-10);
    }
  }
}

TEST_CASE("noise vanishes for constant outcome values") {
  const ToeplitzQuantizer q(5);
  const DiscretePOVM p = discretize_povm(q);
  const std::vector<double> c(p.size(), 3.5);
  CHECK(noise_operator_discrete(p, c).matrix().norm() < 1e-12);
}

TEST_CASE("variance identity is exact") {
  std::mt19937_64 rng(44);
  for (int k : {2, 9, 30}) {
    const ToeplitzQuantizer q(k);
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = btq::testing::random_function(rng, 3);
      const auto theta = random_density(k + 1, rng());
      const auto parts = variance_identity_check(q, f, theta);
      CHECK(parts.residual() <= 1e-10);
      CHECK(parts.noise >= -1e-12);
      CHECK(parts.quantum == doctest::Approx(variance(q.toeplitz(f), theta)));
    }
  }
}

TEST_CASE("coherent-state variance of T(z) at the equator is about 1/k") {
  const int k = 128;
  const ToeplitzQuantizer q(k);
  const auto theta = DensityState::pure(coherent_state(k, SpherePoint{std::numbers::pi / 2, 0.4}));
  const double v = variance(q.toeplitz(SphereFunction::coordinate(2)), theta);
  CHECK(k * v == doctest::Approx(1.0).epsilon(0.05));
  // Exact value: Var(J_z) = k/4 on an equatorial coherent state, T(z) = J_z / (k/2 + 1).
  CHECK(v == doctest::Approx(0.25 * k / std::pow(0.5 * k + 1, 2)).epsilon(1e-10));
}
