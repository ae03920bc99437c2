#include "btq/sphere_fn.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace btq;
using btq::testing::random_function;

namespace {

const SphereFunction X = SphereFunction::coordinate(0);
const SphereFunction Y = SphereFunction::coordinate(1);
const SphereFunction Z = SphereFunction::coordinate(2);

double sup_diff(const SphereFunction& a, const SphereFunction& b) { return sup_norm(a - b); }

} // namespace

TEST_CASE("coordinate functions evaluate to the ambient coordinates") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p = btq::testing::random_unit(rng);
    CHECK(evaluate(X, p) == doctest::Approx(p.x()).epsilon(1e-13));
    CHECK(evaluate(Y, p) == doctest::Approx(p.y()).epsilon(1e-13));
    CHECK(evaluate(Z, p) == doctest::Approx(p.z()).epsilon(1e-13));
  }
}

TEST_CASE("harmonics are orthonormal against normalized area") {
  // Independent product rule, not the library grid.
  std::vector<double> z, w;
  btq::testing::legendre_nodes(12, z, w);
  const int n_phi = 25;
  for (int l1 = 0; l1 <= 4; ++l1)
    for (int m1 = -l1; m1 <= l1; ++m1)
      for (int l2 = l1; l2 <= 4; ++l2)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          const auto a = SphereFunction::harmonic(l1, m1), b = SphereFunction::harmonic(l2, m2);
          double s = 0.0;
          for (std::size_t i = 0; i < z.size(); ++i)
            for (int j = 0; j < n_phi; ++j) {
              const SpherePoint p{std::acos(z[i]), 2 * std::numbers::pi * j / n_phi};
              s += 0.5 * w[i] / n_phi * evaluate(a, p) * evaluate(b, p);
            }
          CHECK(s == doctest::Approx((l1 == l2 && m1 == m2) ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
        }
}

TEST_CASE("synthesis and projection round trip (Parseval)") {
  std::mt19937_64 rng(2);
  for (int band : {0, 3, 9, 17}) {
    const auto f = random_function(rng, band);
    const auto& grid = cached_grid(2 * band);
    const auto values = synthesize(f, grid);
    CHECK(coeff_distance(project(values, grid, band), f) < 1e-12);
    double energy = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) energy += grid.weight(q) * values[q] * values[q];
    CHECK(energy == doctest::Approx(f.l2_norm_squared()).epsilon(1e-12));
  }
}

TEST_CASE("multiply agrees with the pointwise product") {
  std::mt19937_64 rng(3);
  const auto f = random_function(rng, 5), g = random_function(rng, 7);
  const auto fg = multiply(f, g);
  CHECK(fg.band_limit() == 12);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d p = btq::testing::random_unit(rng);
    CHECK(evaluate(fg, p) == doctest::Approx(evaluate(f, p) * evaluate(g, p)).epsilon(1e-11));
  }
}

TEST_CASE("Laplacian eigenvalues are 2 l (l + 1)") {
  for (int l = 0; l <= 10; ++l) {
    const auto y = SphereFunction::harmonic(l, l / 2);
    CHECK(coeff_distance(laplacian(y), convention::laplace_eigenvalue(l) * y) < 1e-12);
  }
}

TEST_CASE("Poisson bracket of the coordinates") {
  CHECK(coeff_distance(poisson_bracket(X, Y), 2.0 * Z) < 1e-13);
  CHECK(coeff_distance(poisson_bracket(Y, Z), 2.0 * X) < 1e-13);
  CHECK(coeff_distance(poisson_bracket(Z, X), 2.0 * Y) < 1e-13);
}

TEST_CASE("bracket with z is minus twice the longitude derivative") {
  std::mt19937_64 rng(4);
  const auto f = random_function(rng, 6);
  CHECK(coeff_distance(poisson_bracket(Z, f), -2.0 * d_phi(f)) < 1e-12);
}

TEST_CASE("Poisson bracket: antisymmetry, Leibniz and Jacobi on random triples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_function(rng, 3), g = random_function(rng, 4), h = random_function(rng, 2);
    CHECK(sup_diff(poisson_bracket(f, g), -poisson_bracket(g, f)) < 1e-12);
    const auto lhs = poisson_bracket(multiply(f, g), h);
    const auto rhs = multiply(f, poisson_bracket(g, h)) + multiply(g, poisson_bracket(f, h));
    CHECK(sup_diff(lhs, rhs) < 1e-11);
    const auto jac = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) +
                     poisson_bracket(h, poisson_bracket(f, g));
    CHECK(sup_norm(jac) < 1e-10);
  }
}

TEST_CASE("gradient pairing matches the pointwise derivative route") {
  std::mt19937_64 rng(6);
  const auto f = random_function(rng, 5), g = random_function(rng, 6);
  const auto& grid = cached_grid(24);
  const auto df = derivatives_on_grid(f, grid), dg = derivatives_on_grid(g, grid);
  const auto pairing = synthesize(grad_pairing(f, g), grid);
  double worst = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    // Round-metric pairing doubled: g_p is half the round metric.
    const double direct = 2.0 * (df.d_theta[q] * dg.d_theta[q] + df.d_phi_over_sin[q] * dg.d_phi_over_sin[q]);
    worst = std::max(worst, std::abs(direct - pairing[q]));
  }
  CHECK(worst < 1e-11);
  CHECK(coeff_distance(grad_pairing(Z, Z), 2.0 * (SphereFunction::constant(1.0) - multiply(Z, Z))) < 1e-13);
}

TEST_CASE("gradient_at is tangent and reproduces directional derivatives") {
  std::mt19937_64 rng(7);
  const auto f = random_function(rng, 4);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d p = btq::testing::random_unit(rng);
    const Eigen::Vector3d grad = gradient_at(f, SpherePoint::from_ambient(p));
    CHECK(std::abs(grad.dot(p)) < 1e-12);
    const Eigen::Vector3d t = btq::testing::random_unit(rng).cross(p).normalized();
    const double h = 1e-5;
    const auto moved = [&](double s) { return (p * std::cos(s) + t * std::sin(s)).eval(); };
    const double numeric = (evaluate(f, moved(h)) - evaluate(f, moved(-h))) / (2 * h);
    // g_p(grad f, t) = 1/2 grad.t equals df(t).
    CHECK(0.5 * grad.dot(t) == doctest::Approx(numeric).epsilon(1e-7));
  }
}

TEST_CASE("Legendre functions obey the three-term recurrence") {
  for (int n = 1; n <= 40; ++n) {
    const auto lhs = double(n + 1) * legendre(n + 1);
    const auto rhs = double(2 * n + 1) * multiply(Z, legendre(n)) - double(n) * legendre(n - 1);
    CHECK(sup_diff(lhs, rhs) < 1e-9);
  }
  CHECK(evaluate(legendre(7), Eigen::Vector3d(0, 0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("rotation acts as composition with the inverse rotation") {
  std::mt19937_64 rng(8);
  const auto f = random_function(rng, 6);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.9, btq::testing::random_unit(rng)).toRotationMatrix();
  const auto g = rotate(f, r);
  CHECK(g.l2_norm_squared() == doctest::Approx(f.l2_norm_squared()).epsilon(1e-12));
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p = btq::testing::random_unit(rng);
    CHECK(evaluate(g, p) == doctest::Approx(evaluate(f, r.transpose() * p)).epsilon(1e-11));
  }
}

TEST_CASE("heat flow damps each band by exp(-s lambda_l)") {
  const auto y = SphereFunction::harmonic(3, -1);
  CHECK(coeff_distance(heat_flow(y, 0.1), std::exp(-0.1 * 24.0) * y) < 1e-14);
}

TEST_CASE("sample_extrema sees the poles") {
  const auto e = sample_extrema(Z);
  CHECK(e.max == doctest::Approx(1.0));
  CHECK(e.min == doctest::Approx(-1.0));
  CHECK(sup_norm(legendre(5)) == doctest::Approx(1.0));
}

TEST_CASE("function parser") {
  CHECK(coeff_distance(parse_function("z"), Z) < 1e-15);
  CHECK(coeff_distance(parse_function("x*y"), multiply(X, Y)) < 1e-15);
  CHECK(coeff_distance(parse_function("P3"), legendre(3)) < 1e-15);
  CHECK(coeff_distance(parse_function("Y2,-1"), SphereFunction::harmonic(2, -1)) < 1e-15);
  CHECK(parse_function("1").mean() == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_function("w"), PreconditionError);
  CHECK_THROWS_AS(parse_function("Y2,3"), PreconditionError);
  CHECK_THROWS_AS(parse_function(""), PreconditionError);
}

TEST_CASE("negative band limits are rejected") {
  CHECK_THROWS_AS(SphereFunction(-1), PreconditionError);
}
