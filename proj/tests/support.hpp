#pragma once

// Shared generators and brute-force oracles for the test suites. Nothing here
// goes through the library's quadrature or coherent-state cache.

#include "btq/operator_core.hpp"
#include "btq/sphere_fn.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace btq::testing {

inline SphereFunction random_function(std::mt19937_64& rng, int band, double scale = 1.0) {
  std::normal_distribution<double> normal;
  SphereFunction f(band);
  for (auto& c : f.coeffs()) c = scale * normal(rng) / std::sqrt(double(SphereFunction::count(band)));
  return f;
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
  return v.normalized();
}

// Legendre nodes by Newton iteration on the three-term recurrence.
inline void legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Spin-k/2 coherent vector straight from the binomial formula.
inline ComplexVector coherent_oracle(int k, double theta, double phi) {
  ComplexVector c(k + 1);
  const double ch = std::cos(theta / 2), sh = std::sin(theta / 2);
  for (int m = 0; m <= k; ++m) {
    const double binom = std::exp(std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0));
    c(m) = std::sqrt(binom) * std::pow(ch, k - m) * std::pow(sh, m) * std::polar(1.0, m * phi);
  }
  return c;
}

// (k+1) * integral f |x><x| d sigma on a product rule of ample degree.
template <class F>
ComplexMatrix toeplitz_oracle(int k, F&& f, int degree) {
  std::vector<double> z, w;
  legendre_nodes(degree / 2 + 2, z, w);
  const int n_phi = degree + 3;
  ComplexMatrix t = ComplexMatrix::Zero(k + 1, k + 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double theta = std::acos(z[i]);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2 * std::numbers::pi * j / n_phi;
      const ComplexVector c = coherent_oracle(k, theta, phi);
      const Eigen::Vector3d p(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), z[i]);
      t += (k + 1) * (0.5 * w[i] / n_phi) * f(p) * (c * c.adjoint());
    }
  }
  return t;
}

} // namespace btq::testing
