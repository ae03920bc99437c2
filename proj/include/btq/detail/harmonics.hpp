#pragma once

// Low-level associated-Legendre and ring-Fourier helpers shared by the
// function and operator modules.

#include "btq/sphere_fn.hpp"

#include <span>
#include <vector>

namespace btq::detail {

constexpr int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }
constexpr int tri_count(int band) { return (band + 1) * (band + 2) / 2; }

/// sigma-normalized associated Legendre values Pbar_lm(cos theta), 0 <= m <= l <= band,
/// without the Condon-Shortley phase. When `over_sin` is non-empty it receives
/// Pbar_lm / sin(theta) for m >= 1, which stays finite at the poles.
void assoc_legendre(int band, double z, double s, std::span<double> pbar,
                    std::span<double> over_sin = {});

/// d Pbar_lm / d theta from the two tables above.
void assoc_legendre_dtheta(int band, double z, std::span<const double> pbar,
                           std::span<const double> over_sin, std::span<double> out);

/// Azimuthal Fourier content of f on one ring:
///   f(theta, phi) = a[0] + sum_{m>=1} a[m] cos(m phi) + b[m] sin(m phi),
/// given the Legendre table `table` (values, derivative or over-sin variant).
void ring_fourier(const SphereFunction& f, std::span<const double> table, std::span<double> a,
                  std::span<double> b);

/// Adjoint of ring_fourier: adds weight * (a[m] * Ybar_lm-cos + b[m] * Ybar_lm-sin) into f.
/// Here a[m], b[m] are azimuthal averages of samples against cos(m phi), sin(m phi).
void ring_accumulate(SphereFunction& f, std::span<const double> pbar, double weight,
                     std::span<const double> a, std::span<const double> b);

/// Angular Fourier averages (1/n) sum_j v_j cos(m phi_j) and sin(m phi_j), m = 0..band.
void azimuthal_averages(std::span<const double> values, int band, std::span<double> a,
                        std::span<double> b);

} // namespace btq::detail
