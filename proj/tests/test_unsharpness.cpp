#include "btq/smearing.hpp"
#include "btq/unsharpness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace btq;
using btq::testing::random_function;

namespace {

const SphereFunction Z = SphereFunction::coordinate(2);

std::shared_ptr<const ToeplitzQuantizer> toeplitz(int k) { return std::make_shared<ToeplitzQuantizer>(k); }

Eigen::Matrix2d random_spd(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Matrix2d a;
  a << normal(rng), normal(rng), normal(rng), normal(rng);
  return a * a.transpose() + 0.1 * Eigen::Matrix2d::Identity();
}

} // namespace

TEST_CASE("extrapolated standard cocycle on (z, z) is -(1 - z^2)") {
  const auto q64 = toeplitz(64), q128 = toeplitz(128);
  const auto c = cocycle_extrapolate(cocycle_estimate(*q64, Z, Z), cocycle_estimate(*q128, Z, Z));
  const auto expected = -1.0 * (SphereFunction::constant(1.0) - multiply(Z, Z));
  CHECK(sup_norm(c.plus - expected) <= 0.05 * sup_norm(expected));
  CHECK(sup_norm(c.minus) < 1e-10);
}

TEST_CASE("single-level cocycle is exactly non-positive on the diagonal") {
  std::mt19937_64 rng(31);
  const auto q = toeplitz(24);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_function(rng, 3);
    CHECK(sample_extrema(cocycle_estimate(*q, f, f).plus).max <= 1e-10);
  }
}

TEST_CASE("antisymmetric part approaches half the Poisson bracket") {
  const auto x = SphereFunction::coordinate(0), y = SphereFunction::coordinate(1);
  std::vector<double> err;
  for (int k : {16, 32, 64}) err.push_back(sup_norm(cocycle_estimate(*toeplitz(k), x, y).minus - Z));
  // {x, y} / 2 = z, reached at O(1/k).
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("standard cocycle is a Hochschild cocycle and a biderivation") {
  std::mt19937_64 rng(32);
  const CocycleFn c = [](const SphereFunction& f, const SphereFunction& g) { return standard_cocycle(f, g); };
  const SymmetricCocycleFn cp = [](const SphereFunction& f, const SphereFunction& g) {
    return standard_cocycle(f, g).re;
  };
  for (int trial = 0; trial < 3; ++trial) {
    const auto f1 = random_function(rng, 2), f2 = random_function(rng, 3), f3 = random_function(rng, 2);
    CHECK(hochschild_residual(c, f1, f2, f3) < 1e-11);
    CHECK(leibniz_residual(cp, f1, f2, f3) < 1e-11);
  }
}

TEST_CASE("Hochschild residual of the extracted cocycle decays like 1/k") {
  std::mt19937_64 rng(33);
  const auto f1 = random_function(rng, 1), f2 = random_function(rng, 1), f3 = random_function(rng, 1);
  std::vector<int> ks{32, 64, 128};
  std::vector<double> hoch, leib;
  for (int k : ks) {
    const auto q = toeplitz(k);
    hoch.push_back(hochschild_residual(
        [&](const SphereFunction& f, const SphereFunction& g) { return cocycle_estimate(*q, f, g).full(); }, f1,
        f2, f3));
    leib.push_back(leibniz_residual(
        [&](const SphereFunction& f, const SphereFunction& g) { return cocycle_estimate(*q, f, g).plus; }, f1,
        f2, f3));
  }
  CHECK(fitted_order(ks, hoch) > 0.8);
  CHECK(fitted_order(ks, leib) > 0.8);
}

TEST_CASE("pointwise decomposition G = omega J + rho") {
  std::mt19937_64 rng(34);
  const Eigen::Matrix2d omega = omega_matrix();
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix2d g = random_spd(rng);
    const auto d = decompose_point(g);
    CHECK((omega * d.J + d.rho - g).norm() < 1e-12);
    CHECK((d.J * d.J + Eigen::Matrix2d::Identity()).norm() < 1e-11);
    CHECK(d.alpha == doctest::Approx(std::sqrt(g.determinant())));
    // omega(., J .) is G / sqrt(det G), so rho is psd exactly when det G >= 1.
    CHECK((d.rho - (1.0 - 1.0 / d.alpha) * g).norm() < 1e-11);
    CHECK((omega * d.K - g).norm() < 1e-12);
  }
}

TEST_CASE("total unsharpness of analytic metrics") {
  const auto unit = metric_on_grid([](const SpherePoint&) { return Eigen::Matrix2d::Identity().eval(); });
  CHECK(total_unsharpness(unit) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-13));
  const auto scaled = metric_on_grid([](const SpherePoint&) { return (2.0 * Eigen::Matrix2d::Identity()).eval(); });
  CHECK(total_unsharpness(scaled) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-13));
  // sqrt(1 + 2 s sin^2) integrated numerically on an independent rule.
  const double s = 0.5;
  const auto zz = metric_on_grid([&](const SpherePoint& p) {
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    g(0, 0) += 2 * s * std::pow(std::sin(p.theta), 2);
    return g;
  });
  std::vector<double> z, w;
  btq::testing::legendre_nodes(200, z, w);
  double ref = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) ref += 0.5 * w[i] * std::sqrt(1 + 2 * s * (1 - z[i] * z[i]));
  CHECK(total_unsharpness(zz) == doctest::Approx(2 * std::numbers::pi * ref).epsilon(1e-6));
}

TEST_CASE("standard metric is the identity and does not depend on the probes") {
  const auto q32 = toeplitz(32), q64 = toeplitz(64);
  MetricOptions rotated;
  rotated.probe_rotation = Eigen::AngleAxisd(0.8, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const auto a = metric_reconstruct(*q32, *q64);
  const auto b = metric_reconstruct(*q32, *q64, rotated);
  double diff = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.G.size(); ++i) {
    diff = std::max(diff, (a.G[i] - b.G[i]).cwiseAbs().maxCoeff());
    err = std::max(err, (a.G[i] - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
  }
  CHECK(diff < 1e-10);
  CHECK(err < 0.01);
  const auto dec = metric_decompose(a);
  CHECK(dec.min_rho_eigenvalue > -0.01);
}

TEST_CASE("heat smearing scales the metric by 1 + 4t") {
  const double t = 0.1;
  const HeatQuantizer a(toeplitz(32), t), b(toeplitz(64), t);
  const auto field = metric_reconstruct(a, b);
  for (const auto& g : field.G) CHECK((g - (1 + 4 * t) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("metaplectic metric is degenerate and decomposition refuses it") {
  const MetaplecticQuantizer a(toeplitz(16)), b(toeplitz(32));
  const auto field = metric_reconstruct(a, b);
  CHECK(total_unsharpness(field) < 0.1);
  Eigen::Matrix2d bad = Eigen::Matrix2d::Identity();
  bad(1, 1) = -0.5;
  MetricField f = field;
  f.G[3] = bad;
  CHECK_THROWS_AS(metric_decompose(f), PreconditionError);
}

TEST_CASE("metric reconstruction needs the pair k, 2k") {
  CHECK_THROWS_AS(metric_reconstruct(*toeplitz(16), *toeplitz(24)), PreconditionError);
}
