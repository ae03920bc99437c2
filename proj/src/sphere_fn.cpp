#include "btq/sphere_fn.hpp"
#include "btq/detail/harmonics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace btq {

namespace detail {

namespace {

struct RecurrenceCoefficients {
  std::vector<double> a, b;  // indexed like the triangular table
};

// The sqrt-heavy recurrence weights depend only on (l, m); build them once per band.
const RecurrenceCoefficients& recurrence(int band) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<RecurrenceCoefficients>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[band];
  if (!slot) {
    slot = std::make_unique<RecurrenceCoefficients>();
    slot->a.assign(tri_count(band), 0.0);
    slot->b.assign(tri_count(band), 0.0);
    for (int m = 0; m <= band; ++m)
      for (int l = m + 2; l <= band; ++l) {
        const double l2 = double(l) * l;
        const double m2 = double(m) * m;
        slot->a[tri_index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        slot->b[tri_index(l, m)] = std::sqrt((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - m2) /
                                             ((2.0 * l - 3.0) * (l2 - m2)));
      }
  }
  return *slot;
}

} // namespace

void assoc_legendre(int band, double z, double s, std::span<double> pbar,
                    std::span<double> over_sin) {
  const bool want_q = !over_sin.empty();
  const RecurrenceCoefficients& rc = recurrence(band);
  pbar[0] = 1.0;
  if (want_q) over_sin[0] = 0.0;
  // Sectoral terms and their first off-diagonal neighbours.
  double pmm = 1.0;
  double qmm = 0.0;
  for (int m = 0; m <= band; ++m) {
    if (m >= 1) {
      const double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      qmm = (m == 1) ? f : f * s * qmm;
      pmm = f * s * pmm;
    }
    pbar[tri_index(m, m)] = pmm;
    if (want_q) over_sin[tri_index(m, m)] = (m == 0) ? 0.0 : qmm;
    if (m + 1 <= band) {
      const double c = std::sqrt(2.0 * m + 3.0) * z;
      pbar[tri_index(m + 1, m)] = c * pmm;
      if (want_q) over_sin[tri_index(m + 1, m)] = (m == 0) ? 0.0 : c * qmm;
    }
    for (int l = m + 2; l <= band; ++l) {
      const double a = rc.a[tri_index(l, m)];
      const double b = rc.b[tri_index(l, m)];
      pbar[tri_index(l, m)] = a * z * pbar[tri_index(l - 1, m)] - b * pbar[tri_index(l - 2, m)];
      if (want_q) {
        over_sin[tri_index(l, m)] =
            (m == 0) ? 0.0
                     : a * z * over_sin[tri_index(l - 1, m)] - b * over_sin[tri_index(l - 2, m)];
      }
    }
  }
}

void assoc_legendre_dtheta(int band, double z, std::span<const double> pbar,
                           std::span<const double> over_sin, std::span<double> out) {
  for (int l = 0; l <= band; ++l) {
    for (int m = 0; m <= l; ++m) {
      double d = 0.0;
      if (m >= 1) d += m * z * over_sin[tri_index(l, m)];
      if (m + 1 <= l) d -= std::sqrt(double(l - m) * (l + m + 1)) * pbar[tri_index(l, m + 1)];
      out[tri_index(l, m)] = d;
    }
  }
}

void ring_fourier(const SphereFunction& f, std::span<const double> table, std::span<double> a,
                  std::span<double> b) {
  const int band = f.band_limit();
  const auto c = f.coeffs();
  for (int m = 0; m <= band; ++m) {
    double sa = 0.0;
    double sb = 0.0;
    for (int l = m; l <= band; ++l) {
      const double t = table[tri_index(l, m)];
      sa += c[SphereFunction::index(l, m)] * t;
      if (m > 0) sb += c[SphereFunction::index(l, -m)] * t;
    }
    const double norm = (m == 0) ? 1.0 : std::numbers::sqrt2;
    a[m] = norm * sa;
    b[m] = norm * sb;
  }
}

void ring_accumulate(SphereFunction& f, std::span<const double> pbar, double weight,
                     std::span<const double> a, std::span<const double> b) {
  const int band = f.band_limit();
  auto c = f.coeffs();
  for (int m = 0; m <= band; ++m) {
    const double norm = (m == 0) ? 1.0 : std::numbers::sqrt2;
    const double wa = weight * norm * a[m];
    const double wb = weight * norm * b[m];
    for (int l = m; l <= band; ++l) {
      const double t = pbar[tri_index(l, m)];
      c[SphereFunction::index(l, m)] += wa * t;
      if (m > 0) c[SphereFunction::index(l, -m)] += wb * t;
    }
  }
}

void azimuthal_averages(std::span<const double> values, int band, std::span<double> a,
                        std::span<double> b) {
  const int n = static_cast<int>(values.size());
  std::vector<double> cs(n), sn(n);
  for (int r = 0; r < n; ++r) {
    const double ang = 2.0 * std::numbers::pi * r / n;
    cs[r] = std::cos(ang);
    sn[r] = std::sin(ang);
  }
  for (int m = 0; m <= band; ++m) {
    double sa = 0.0;
    double sb = 0.0;
    for (int j = 0; j < n; ++j) {
      const int r = static_cast<int>((static_cast<long long>(m) * j) % n);
      sa += values[j] * cs[r];
      sb += values[j] * sn[r];
    }
    a[m] = sa / n;
    b[m] = sb / n;
  }
}

} // namespace detail

using detail::tri_count;
using detail::tri_index;

// ---------------------------------------------------------------------------
// Points and grids

SpherePoint SpherePoint::from_ambient(const Eigen::Vector3d& p) {
  const double r = p.norm();
  SpherePoint out;
  out.theta = std::acos(std::clamp(p.z() / r, -1.0, 1.0));
  double phi = std::atan2(p.y(), p.x());
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  out.phi = phi;
  return out;
}

Eigen::Vector3d SpherePoint::ambient() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

Eigen::Vector3d SpherePoint::e_theta() const {
  const double c = std::cos(theta);
  return {c * std::cos(phi), c * std::sin(phi), -std::sin(theta)};
}

Eigen::Vector3d SpherePoint::e_phi() const { return {-std::sin(phi), std::cos(phi), 0.0}; }

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = x;
    nodes[n - 1 - i] = -x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureGrid::QuadratureGrid(int min_exact_degree) {
  if (min_exact_degree < 0) throw PreconditionError("build_grid: degree must be non-negative");
  degree_ = min_exact_degree;
  const int n_theta = (degree_ + 2) / 2; // ceil((d + 1) / 2)
  n_phi_ = degree_ + 1;
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  ring_z_ = x;
  ring_s_.resize(n_theta);
  ring_w_.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    ring_s_[i] = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    ring_w_[i] = 0.5 * w[i];
  }
}

double QuadratureGrid::azimuth(int j) const { return 2.0 * std::numbers::pi * j / n_phi_; }

SpherePoint QuadratureGrid::node(std::size_t q) const {
  const int i = static_cast<int>(q / n_phi_);
  const int j = static_cast<int>(q % n_phi_);
  return {std::acos(std::clamp(ring_z_[i], -1.0, 1.0)), azimuth(j)};
}

std::vector<SpherePoint> QuadratureGrid::nodes() const {
  std::vector<SpherePoint> out(size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = node(q);
  return out;
}

QuadratureGrid build_grid(int min_exact_degree) { return QuadratureGrid(min_exact_degree); }

const QuadratureGrid& cached_grid(int exact_degree) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureGrid>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[exact_degree];
  if (!slot) slot = std::make_unique<QuadratureGrid>(exact_degree);
  return *slot;
}

// ---------------------------------------------------------------------------
// SphereFunction

SphereFunction::SphereFunction(int band_limit) : band_(band_limit) {
  if (band_limit < 0) throw PreconditionError("SphereFunction: negative band limit");
  coeffs_.assign(count(band_limit), 0.0);
}

SphereFunction::SphereFunction(int band_limit, std::vector<double> coeffs)
    : band_(band_limit), coeffs_(std::move(coeffs)) {
  if (band_limit < 0) throw PreconditionError("SphereFunction: negative band limit");
  if (static_cast<int>(coeffs_.size()) != count(band_limit))
    throw PreconditionError("SphereFunction: coefficient count does not match band limit");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw PreconditionError("SphereFunction: non-finite coefficient");
}

SphereFunction SphereFunction::constant(double value) {
  SphereFunction f(0);
  f.coeffs_[0] = value;
  return f;
}

SphereFunction SphereFunction::coordinate(int axis) {
  // Y_{1,1} = sqrt(3) x, Y_{1,-1} = sqrt(3) y, Y_{1,0} = sqrt(3) z.
  static constexpr int kM[3] = {1, -1, 0};
  if (axis < 0 || axis > 2) throw PreconditionError("coordinate: axis must be 0, 1 or 2");
  return harmonic(1, kM[axis], 1.0 / std::sqrt(3.0));
}

SphereFunction SphereFunction::harmonic(int l, int m, double scale) {
  if (l < 0 || std::abs(m) > l) throw PreconditionError("harmonic: need |m| <= l");
  SphereFunction f(l);
  f.coeff(l, m) = scale;
  return f;
}

double SphereFunction::coeff(int l, int m) const {
  if (l > band_) return 0.0;
  return coeffs_[index(l, m)];
}

double& SphereFunction::coeff(int l, int m) {
  if (l > band_ || l < 0 || std::abs(m) > l)
    throw PreconditionError("SphereFunction::coeff: index outside band");
  return coeffs_[index(l, m)];
}

double SphereFunction::l2_norm_squared() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return s;
}

SphereFunction SphereFunction::truncated(int band_limit) const {
  if (band_limit >= band_) return padded(band_limit);
  SphereFunction out(band_limit);
  std::copy_n(coeffs_.begin(), count(band_limit), out.coeffs_.begin());
  return out;
}

SphereFunction SphereFunction::padded(int band_limit) const {
  if (band_limit <= band_) return truncated(band_limit);
  SphereFunction out(band_limit);
  std::copy(coeffs_.begin(), coeffs_.end(), out.coeffs_.begin());
  return out;
}

int SphereFunction::effective_band(double tol) const {
  for (int l = band_; l > 0; --l)
    for (int m = -l; m <= l; ++m)
      if (std::abs(coeffs_[index(l, m)]) > tol) return l;
  return 0;
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& other) {
  if (other.band_ > band_) *this = padded(other.band_);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SphereFunction& SphereFunction::operator-=(const SphereFunction& other) {
  if (other.band_ > band_) *this = padded(other.band_);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SphereFunction& SphereFunction::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
SphereFunction operator-(SphereFunction a, const SphereFunction& b) { return a -= b; }
SphereFunction operator*(double s, SphereFunction f) { return f *= s; }
SphereFunction operator*(SphereFunction f, double s) { return f *= s; }
SphereFunction operator-(SphereFunction f) { return f *= -1.0; }

double coeff_distance(const SphereFunction& a, const SphereFunction& b) {
  const int band = std::max(a.band_limit(), b.band_limit());
  double d = 0.0;
  for (int l = 0; l <= band; ++l)
    for (int m = -l; m <= l; ++m) d = std::max(d, std::abs(a.coeff(l, m) - b.coeff(l, m)));
  return d;
}

// ---------------------------------------------------------------------------
// Synthesis and analysis

namespace {

struct PointTables {
  double cos_phi = 1.0;
  double sin_phi = 0.0;
  std::vector<double> pbar;
};

PointTables point_tables(int band, const Eigen::Vector3d& p) {
  PointTables t;
  const double r = p.norm();
  const double z = std::clamp(p.z() / r, -1.0, 1.0);
  const double rho = std::hypot(p.x(), p.y()) / r;
  if (rho > 0.0) {
    t.cos_phi = p.x() / (r * rho);
    t.sin_phi = p.y() / (r * rho);
  }
  t.pbar.resize(tri_count(band));
  detail::assoc_legendre(band, z, rho, t.pbar);
  return t;
}

double sum_fourier(std::span<const double> a, std::span<const double> b, double c1, double s1) {
  // cos(m phi), sin(m phi) by the angle-addition recurrence.
  double value = a[0];
  double cm = 1.0;
  double sm = 0.0;
  for (std::size_t m = 1; m < a.size(); ++m) {
    const double cn = cm * c1 - sm * s1;
    const double sn = sm * c1 + cm * s1;
    cm = cn;
    sm = sn;
    value += a[m] * cm + b[m] * sm;
  }
  return value;
}

void ring_values(std::span<const double> a, std::span<const double> b, int n_phi,
                 std::span<double> out) {
  const int band = static_cast<int>(a.size()) - 1;
  std::vector<double> cs(n_phi), sn(n_phi);
  for (int r = 0; r < n_phi; ++r) {
    const double ang = 2.0 * std::numbers::pi * r / n_phi;
    cs[r] = std::cos(ang);
    sn[r] = std::sin(ang);
  }
  for (int j = 0; j < n_phi; ++j) {
    double v = a[0];
    for (int m = 1; m <= band; ++m) {
      const int r = static_cast<int>((static_cast<long long>(m) * j) % n_phi);
      v += a[m] * cs[r] + b[m] * sn[r];
    }
    out[j] = v;
  }
}

void ring_phi_derivative(std::span<const double> a, std::span<const double> b, int n_phi,
                         std::span<double> out) {
  const int band = static_cast<int>(a.size()) - 1;
  std::vector<double> da(band + 1, 0.0), db(band + 1, 0.0);
  for (int m = 1; m <= band; ++m) {
    da[m] = m * b[m];
    db[m] = -m * a[m];
  }
  ring_values(da, db, n_phi, out);
}

} // namespace

double evaluate(const SphereFunction& f, const Eigen::Vector3d& p) {
  const int band = f.band_limit();
  const auto t = point_tables(band, p);
  std::vector<double> a(band + 1), b(band + 1);
  detail::ring_fourier(f, t.pbar, a, b);
  return sum_fourier(a, b, t.cos_phi, t.sin_phi);
}

double evaluate(const SphereFunction& f, const SpherePoint& p) { return evaluate(f, p.ambient()); }

void evaluate_many(std::span<const SphereFunction> fs, const Eigen::Vector3d& p,
                   std::span<double> out) {
  int band = 0;
  for (const auto& f : fs) band = std::max(band, f.band_limit());
  const auto t = point_tables(band, p);
  std::vector<double> a(band + 1), b(band + 1);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const int L = fs[i].band_limit();
    detail::ring_fourier(fs[i], t.pbar, std::span(a).first(L + 1), std::span(b).first(L + 1));
    out[i] = sum_fourier(std::span(a).first(L + 1), std::span(b).first(L + 1), t.cos_phi,
                         t.sin_phi);
  }
}

std::vector<double> synthesize_rings(const SphereFunction& f, std::span<const double> thetas,
                                     int n_phi) {
  const int band = f.band_limit();
  std::vector<double> out(thetas.size() * n_phi);
  std::vector<double> pbar(tri_count(band)), a(band + 1), b(band + 1);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    detail::assoc_legendre(band, std::cos(thetas[i]), std::sin(thetas[i]), pbar);
    detail::ring_fourier(f, pbar, a, b);
    ring_values(a, b, n_phi, std::span(out).subspan(i * n_phi, n_phi));
  }
  return out;
}

std::vector<double> synthesize(const SphereFunction& f, const QuadratureGrid& grid) {
  const int band = f.band_limit();
  const int n_phi = grid.num_azimuths();
  std::vector<double> out(grid.size());
  std::vector<double> pbar(tri_count(band)), a(band + 1), b(band + 1);
  for (int i = 0; i < grid.num_rings(); ++i) {
    detail::assoc_legendre(band, grid.ring_z(i), grid.ring_sin(i), pbar);
    detail::ring_fourier(f, pbar, a, b);
    ring_values(a, b, n_phi, std::span(out).subspan(std::size_t(i) * n_phi, n_phi));
  }
  return out;
}

GridDerivatives derivatives_on_grid(const SphereFunction& f, const QuadratureGrid& grid) {
  const int band = f.band_limit();
  const int n_phi = grid.num_azimuths();
  GridDerivatives d;
  d.value.resize(grid.size());
  d.d_theta.resize(grid.size());
  d.d_phi.resize(grid.size());
  d.d_phi_over_sin.resize(grid.size());
  std::vector<double> pbar(tri_count(band)), q(tri_count(band)), dp(tri_count(band));
  std::vector<double> a(band + 1), b(band + 1);
  for (int i = 0; i < grid.num_rings(); ++i) {
    const double z = grid.ring_z(i);
    detail::assoc_legendre(band, z, grid.ring_sin(i), pbar, q);
    detail::assoc_legendre_dtheta(band, z, pbar, q, dp);
    const auto slot = [&](std::vector<double>& v) {
      return std::span(v).subspan(std::size_t(i) * n_phi, n_phi);
    };
    detail::ring_fourier(f, pbar, a, b);
    ring_values(a, b, n_phi, slot(d.value));
    ring_phi_derivative(a, b, n_phi, slot(d.d_phi));
    detail::ring_fourier(f, dp, a, b);
    ring_values(a, b, n_phi, slot(d.d_theta));
    detail::ring_fourier(f, q, a, b);
    ring_phi_derivative(a, b, n_phi, slot(d.d_phi_over_sin));
  }
  return d;
}

SphereFunction project(std::span<const double> samples, const QuadratureGrid& grid, int band) {
  if (band < 0) throw PreconditionError("project: negative band");
  if (grid.exact_degree() < 2 * band)
    throw PreconditionError("project: grid exact degree " + std::to_string(grid.exact_degree()) +
                            " is below 2L = " + std::to_string(2 * band));
  if (samples.size() != grid.size()) throw PreconditionError("project: sample count mismatch");
  const int n_phi = grid.num_azimuths();
  SphereFunction out(band);
  std::vector<double> pbar(tri_count(band)), a(band + 1), b(band + 1);
  for (int i = 0; i < grid.num_rings(); ++i) {
    for (std::size_t j = 0; j < samples.size() / grid.num_rings(); ++j)
      if (!std::isfinite(samples[std::size_t(i) * n_phi + j]))
        throw PreconditionError("project: non-finite sample");
    detail::azimuthal_averages(samples.subspan(std::size_t(i) * n_phi, n_phi), band, a, b);
    detail::assoc_legendre(band, grid.ring_z(i), grid.ring_sin(i), pbar);
    detail::ring_accumulate(out, pbar, grid.ring_weight(i), a, b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algebra

SphereFunction multiply(const SphereFunction& f, const SphereFunction& g) {
  const int band = f.band_limit() + g.band_limit();
  const auto& grid = cached_grid(2 * band);
  auto fv = synthesize(f, grid);
  const auto gv = synthesize(g, grid);
  for (std::size_t q = 0; q < fv.size(); ++q) fv[q] *= gv[q];
  return project(fv, grid, band);
}

SphereFunction laplacian(const SphereFunction& f) {
  SphereFunction out = f;
  for (int l = 0; l <= f.band_limit(); ++l)
    for (int m = -l; m <= l; ++m) out.coeff(l, m) *= convention::laplace_eigenvalue(l);
  return out;
}

SphereFunction heat_flow(const SphereFunction& f, double s) {
  if (!(s >= 0.0)) throw PreconditionError("heat_flow: time must be non-negative");
  SphereFunction out = f;
  for (int l = 0; l <= f.band_limit(); ++l) {
    const double factor = std::exp(-convention::laplace_eigenvalue(l) * s);
    for (int m = -l; m <= l; ++m) out.coeff(l, m) *= factor;
  }
  return out;
}

SphereFunction grad_pairing(const SphereFunction& f, const SphereFunction& g) {
  SphereFunction out = multiply(f, laplacian(g));
  out += multiply(g, laplacian(f));
  out -= laplacian(multiply(f, g));
  out *= 0.5;
  return out;
}

SphereFunction poisson_bracket(const SphereFunction& f, const SphereFunction& g) {
  const int band = f.band_limit() + g.band_limit();
  const auto& grid = cached_grid(std::max(2 * band, 2));
  const auto df = derivatives_on_grid(f, grid);
  const auto dg = derivatives_on_grid(g, grid);
  // {f, g} = (2 / sin theta)(f_theta g_phi - f_phi g_theta); orientation fixed so
  // that {x, y} = 2 z, matching the commutators of the coherent-state quantization.
  std::vector<double> v(grid.size());
  for (std::size_t q = 0; q < v.size(); ++q)
    v[q] = 2.0 * (df.d_theta[q] * dg.d_phi_over_sin[q] - df.d_phi_over_sin[q] * dg.d_theta[q]);
  return project(v, grid, std::max(band - 1, 0));
}

SphereFunction d_phi(const SphereFunction& f) {
  SphereFunction out(f.band_limit());
  for (int l = 1; l <= f.band_limit(); ++l)
    for (int m = 1; m <= l; ++m) {
      out.coeff(l, -m) = -m * f.coeff(l, m);
      out.coeff(l, m) = m * f.coeff(l, -m);
    }
  return out;
}

SphereFunction legendre(int n) {
  if (n < 0) throw PreconditionError("legendre: n must be non-negative");
  return SphereFunction::harmonic(n, 0, 1.0 / std::sqrt(2.0 * n + 1.0));
}

SphereFunction rotate(const SphereFunction& f, const Eigen::Matrix3d& rotation) {
  const int band = f.band_limit();
  const auto& grid = cached_grid(std::max(2 * band, 1));
  const Eigen::Matrix3d inverse = rotation.transpose();
  std::vector<double> v(grid.size());
  for (std::size_t q = 0; q < v.size(); ++q)
    v[q] = evaluate(f, Eigen::Vector3d(inverse * grid.node(q).ambient()));
  return project(v, grid, band);
}

Eigen::Vector3d gradient_at(const SphereFunction& f, const SpherePoint& p) {
  const int band = f.band_limit();
  const double z = std::cos(p.theta);
  const double s = std::sin(p.theta);
  std::vector<double> pbar(tri_count(band)), q(tri_count(band)), dp(tri_count(band));
  detail::assoc_legendre(band, z, s, pbar, q);
  detail::assoc_legendre_dtheta(band, z, pbar, q, dp);
  std::vector<double> a(band + 1), b(band + 1), da(band + 1), db(band + 1);
  const double c1 = std::cos(p.phi);
  const double s1 = std::sin(p.phi);
  detail::ring_fourier(f, dp, a, b);
  const double f_theta = sum_fourier(a, b, c1, s1);
  detail::ring_fourier(f, q, a, b);
  for (int m = 0; m <= band; ++m) {
    da[m] = m * b[m];
    db[m] = -m * a[m];
  }
  const double f_phi_over_sin = sum_fourier(da, db, c1, s1);
  // g_p is half the round metric, so its gradient is twice the round one.
  return 2.0 * (f_theta * p.e_theta() + f_phi_over_sin * p.e_phi());
}

Extrema sample_extrema(const SphereFunction& f, int resolution) {
  const int n = resolution > 0 ? resolution : std::max(64, 4 * f.band_limit() + 8);
  std::vector<double> thetas(n + 1);
  for (int i = 0; i <= n; ++i) thetas[i] = std::numbers::pi * i / n;
  const auto v = synthesize_rings(f, thetas, 2 * n);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

double sup_norm(const SphereFunction& f, int resolution) {
  return sample_extrema(f, resolution).sup_abs();
}

SphereFunction parse_function(const std::string& spec) {
  if (spec.empty()) throw PreconditionError("parse_function: empty function spec");
  SphereFunction result = SphereFunction::constant(1.0);
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto stop = spec.find('*', start);
    std::string tok = spec.substr(start, stop == std::string::npos ? std::string::npos : stop - start);
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }),
              tok.end());
    SphereFunction factor;
    if (tok == "x") {
      factor = SphereFunction::coordinate(0);
    } else if (tok == "y") {
      factor = SphereFunction::coordinate(1);
    } else if (tok == "z") {
      factor = SphereFunction::coordinate(2);
    } else if (!tok.empty() && tok[0] == 'P') {
      factor = legendre(std::stoi(tok.substr(1)));
    } else if (!tok.empty() && tok[0] == 'Y') {
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw PreconditionError("parse_function: expected Y<l>,<m>");
      factor = SphereFunction::harmonic(std::stoi(tok.substr(1, comma - 1)),
                                        std::stoi(tok.substr(comma + 1)));
    } else {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tok.size())
        throw PreconditionError("parse_function: cannot parse '" + tok + "'");
      factor = SphereFunction::constant(value);
    }
    result = multiply(result, factor);
    if (stop == std::string::npos) break;
    start = stop + 1;
  }
  return result;
}

} // namespace btq
