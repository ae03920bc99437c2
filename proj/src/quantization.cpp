#include "btq/quantization.hpp"
#include "btq/detail/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btq {

namespace {

// sqrt(C(k,m)) cos^{k-m} sin^m with cos = cos(theta/2), sin = sin(theta/2), via logs.
void coherent_amplitudes(int k, double half_cos, double half_sin, std::span<double> out) {
  const double lc = std::log(half_cos);
  const double ls = std::log(half_sin);
  const double lk = std::lgamma(k + 1.0);
  for (int m = 0; m <= k; ++m) {
    double v = 0.5 * (lk - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0));
    if (k - m > 0) v += (k - m) * lc;
    if (m > 0) v += m * ls;
    out[m] = std::exp(v);
  }
}

void ring_amplitudes_from_z(int k, double z, std::span<double> out) {
  coherent_amplitudes(k, std::sqrt(0.5 * (1.0 + z)), std::sqrt(0.5 * (1.0 - z)), out);
}

} // namespace

ComplexVector coherent_state(int k, const SpherePoint& p) {
  if (k < 1) throw PreconditionError("coherent_state: k must be >= 1");
  std::vector<double> a(k + 1);
  coherent_amplitudes(k, std::cos(0.5 * p.theta), std::sin(0.5 * p.theta), a);
  ComplexVector v(k + 1);
  for (int m = 0; m <= k; ++m) v(m) = a[m] * std::polar(1.0, m * p.phi);
  return v;
}

std::vector<HermitianOperator> Quantization::quantize_all(
    std::span<const SphereFunction> fs) const {
  std::vector<HermitianOperator> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(quantize(f));
  return out;
}

int Quantization::symbol_budget() const { return base().budget(); }

// ---------------------------------------------------------------------------

ToeplitzQuantizer::ToeplitzQuantizer(int k, int symbol_band)
    : k_(k), symbol_band_(symbol_band), grid_(k + 2 * symbol_band) {
  if (k < 1) throw PreconditionError("ToeplitzQuantizer: k must be >= 1");
  if (symbol_band < 0) throw PreconditionError("ToeplitzQuantizer: negative symbol band");
  amplitudes_.resize(std::size_t(grid_.num_rings()) * (k + 1));
  for (int i = 0; i < grid_.num_rings(); ++i)
    ring_amplitudes_from_z(k, grid_.ring_z(i),
                           std::span(amplitudes_).subspan(std::size_t(i) * (k + 1), k + 1));
  const auto& deq = cached_grid(2 * k);
  deq_amplitudes_.resize(std::size_t(deq.num_rings()) * (k + 1));
  for (int i = 0; i < deq.num_rings(); ++i)
    ring_amplitudes_from_z(k, deq.ring_z(i),
                           std::span(deq_amplitudes_).subspan(std::size_t(i) * (k + 1), k + 1));
}

std::span<const double> ToeplitzQuantizer::ring_amplitudes(int ring) const {
  return std::span(amplitudes_).subspan(std::size_t(ring) * (k_ + 1), k_ + 1);
}

ComplexVector ToeplitzQuantizer::coherent(std::size_t node) const {
  const int ring = static_cast<int>(node / grid_.num_azimuths());
  const double phi = grid_.azimuth(static_cast<int>(node % grid_.num_azimuths()));
  const auto a = ring_amplitudes(ring);
  ComplexVector v(k_ + 1);
  for (int m = 0; m <= k_; ++m) v(m) = a[m] * std::polar(1.0, m * phi);
  return v;
}

namespace {

// Adds (k+1) W a_m a_n F(m - n) into T for one ring, given F(d) for 0 <= d <= dmax.
void accumulate_ring(ComplexMatrix& t, std::span<const double> a, double weight,
                     std::span<const Complex> f_of_delta) {
  const int k = static_cast<int>(a.size()) - 1;
  const int dmax = std::min<int>(static_cast<int>(f_of_delta.size()) - 1, k);
  const double w = (k + 1) * weight;
  for (int d = 0; d <= dmax; ++d) {
    const Complex fd = w * f_of_delta[d];
    for (int n = 0; n + d <= k; ++n) {
      const int m = n + d;
      const Complex v = fd * (a[m] * a[n]);
      t(m, n) += v;
      if (d > 0) t(n, m) += std::conj(v);
    }
  }
}

} // namespace

HermitianOperator ToeplitzQuantizer::toeplitz(const SphereFunction& f) const {
  const int band = f.band_limit();
  if (band > budget())
    throw PreconditionError("toeplitz: symbol band " + std::to_string(band) +
                            " exceeds quantizer budget " + std::to_string(budget()));
  ComplexMatrix t = ComplexMatrix::Zero(k_ + 1, k_ + 1);
  std::vector<double> pbar(detail::tri_count(band)), a(band + 1), b(band + 1);
  std::vector<Complex> fd(band + 1);
  for (int i = 0; i < grid_.num_rings(); ++i) {
    detail::assoc_legendre(band, grid_.ring_z(i), grid_.ring_sin(i), pbar);
    detail::ring_fourier(f, pbar, a, b);
    // Ring average of f e^{i d phi}.
    fd[0] = a[0];
    for (int d = 1; d <= band; ++d) fd[d] = 0.5 * Complex(a[d], b[d]);
    accumulate_ring(t, ring_amplitudes(i), grid_.ring_weight(i), fd);
  }
  return HermitianOperator(std::move(t));
}

HermitianOperator ToeplitzQuantizer::toeplitz_samples(std::span<const double> samples) const {
  if (samples.size() != grid_.size())
    throw PreconditionError("toeplitz_samples: expected one sample per grid node");
  const int n_phi = grid_.num_azimuths();
  std::vector<Complex> phase(n_phi);
  for (int r = 0; r < n_phi; ++r) phase[r] = std::polar(1.0, 2.0 * std::numbers::pi * r / n_phi);
  ComplexMatrix t = ComplexMatrix::Zero(k_ + 1, k_ + 1);
  std::vector<Complex> fd(k_ + 1);
  for (int i = 0; i < grid_.num_rings(); ++i) {
    const auto v = samples.subspan(std::size_t(i) * n_phi, n_phi);
    for (int d = 0; d <= k_; ++d) {
      Complex s = 0.0;
      for (int j = 0; j < n_phi; ++j)
        s += v[j] * phase[static_cast<int>((static_cast<long long>(d) * j) % n_phi)];
      fd[d] = s / double(n_phi);
    }
    accumulate_ring(t, ring_amplitudes(i), grid_.ring_weight(i), fd);
  }
  return HermitianOperator(std::move(t));
}

std::pair<SphereFunction, SphereFunction> ToeplitzQuantizer::dequantize(
    const ComplexMatrix& a) const {
  if (a.rows() != k_ + 1 || a.cols() != k_ + 1)
    throw PreconditionError("dequantize: operator dimension must be k + 1");
  const auto& rings = cached_grid(2 * k_);
  SphereFunction re(k_), im(k_);
  std::vector<double> pbar(detail::tri_count(k_));
  std::vector<double> are(k_ + 1), bre(k_ + 1), aim(k_ + 1), bim(k_ + 1);
  std::vector<Complex> bplus(k_ + 1), bminus(k_ + 1);
  // Diagonals copied out once so the per-ring sums run over contiguous memory.
  std::vector<Complex> upper(detail::tri_count(k_)), lower(detail::tri_count(k_));
  std::vector<int> offset(k_ + 1);
  for (int d = 0, pos = 0; d <= k_; ++d) {
    offset[d] = pos;
    for (int m = 0; m + d <= k_; ++m, ++pos) {
      upper[pos] = a(m, m + d);
      lower[pos] = a(m + d, m);
    }
  }
  for (int i = 0; i < rings.num_rings(); ++i) {
    const auto amp = std::span(deq_amplitudes_).subspan(std::size_t(i) * (k_ + 1), k_ + 1);
    // <x|A|x> = sum_d B(d) e^{i d phi}, B(d) = sum_m a_m a_{m+d} A_{m,m+d}.
    for (int d = 0; d <= k_; ++d) {
      Complex sp = 0.0, sm = 0.0;
      const Complex* up = upper.data() + offset[d];
      const Complex* lo = lower.data() + offset[d];
      for (int m = 0; m + d <= k_; ++m) {
        const double w = amp[m] * amp[m + d];
        sp += w * up[m];
        sm += w * lo[m];
      }
      bplus[d] = sp;
      bminus[d] = sm;
    }
    are[0] = bplus[0].real();
    aim[0] = bplus[0].imag();
    bre[0] = bim[0] = 0.0;
    for (int d = 1; d <= k_; ++d) {
      const Complex c = 0.5 * (bplus[d] + bminus[d]);
      const Complex s = Complex(0.0, 0.5) * (bplus[d] - bminus[d]);
      are[d] = c.real();
      aim[d] = c.imag();
      bre[d] = s.real();
      bim[d] = s.imag();
    }
    detail::assoc_legendre(k_, rings.ring_z(i), rings.ring_sin(i), pbar);
    detail::ring_accumulate(re, pbar, rings.ring_weight(i), are, bre);
    detail::ring_accumulate(im, pbar, rings.ring_weight(i), aim, bim);
  }
  return {std::move(re), std::move(im)};
}

SphereFunction ToeplitzQuantizer::dequantize(const HermitianOperator& a) const {
  return dequantize(a.matrix()).first;
}

Complex ToeplitzQuantizer::dequantize_at(const ComplexMatrix& a, const SpherePoint& p) const {
  const ComplexVector c = coherent_state(k_, p);
  return c.dot(a * c);
}

// ---------------------------------------------------------------------------

std::array<HermitianOperator, 3> spin_generators(int k) {
  const double j = 0.5 * k;
  ComplexMatrix jp = ComplexMatrix::Zero(k + 1, k + 1);
  Eigen::VectorXd jz(k + 1);
  for (int m = 0; m <= k; ++m) {
    const double mu = j - m;
    jz(m) = mu;
    if (m >= 1) jp(m - 1, m) = std::sqrt(j * (j + 1) - mu * (mu + 1));
  }
  const ComplexMatrix jm = jp.adjoint();
  return {HermitianOperator(0.5 * (jp + jm)),
          HermitianOperator(Complex(0.0, -0.5) * (jp - jm)),
          HermitianOperator::diagonal(jz)};
}

ComplexMatrix spin_rotation(int k, const Eigen::Vector3d& axis, double angle) {
  const Eigen::Vector3d n = axis.normalized();
  const auto gens = spin_generators(k);
  HermitianOperator h = n.x() * gens[0];
  h += n.y() * gens[1];
  h += n.z() * gens[2];
  const Spectrum s = spectrum(h);
  ComplexVector phases(k + 1);
  for (int i = 0; i <= k; ++i) phases(i) = std::polar(1.0, -angle * s.values(i));
  return s.vectors * phases.asDiagonal() * s.vectors.adjoint();
}

// ---------------------------------------------------------------------------

double husimi_moment(const Quantization& q, const SphereFunction& f, const DensityState& theta) {
  return expectation(q.quantize(f), theta);
}

HermitianOperator noise_operator(const Quantization& q, const SphereFunction& f) {
  const SphereFunction ff = multiply(f, f);
  const SphereFunction fs[2] = {f, ff};
  const auto ops = q.quantize_all(fs);
  return ops[1] - square(ops[0]);
}

RawnsleyResult rawnsley_function(const Quantization& q, int probe_band) {
  if (probe_band < 0 || probe_band > q.symbol_budget())
    throw PreconditionError("rawnsley_function: probe band outside the quantizer budget");
  std::vector<SphereFunction> probes;
  for (int l = 0; l <= probe_band; ++l)
    for (int m = -l; m <= l; ++m) probes.push_back(SphereFunction::harmonic(l, m));
  const auto ops = q.quantize_all(probes);
  // Probes are orthonormal, so the least-squares system is diagonal.
  RawnsleyResult out;
  out.density = SphereFunction(probe_band);
  const double k = q.level();
  std::size_t idx = 0;
  for (int l = 0; l <= probe_band; ++l)
    for (int m = -l; m <= l; ++m) out.density.coeff(l, m) = ops[idx++].trace() / k;
  out.r = k * (out.density - SphereFunction::constant(1.0));
  out.mean_r = out.r.mean();
  return out;
}

double sup_abs(const ComplexFunction& c, int resolution) {
  const int band = std::max(c.re.band_limit(), c.im.band_limit());
  const int n = resolution > 0 ? resolution : std::max(64, 4 * band + 8);
  std::vector<double> thetas(n + 1);
  for (int i = 0; i <= n; ++i) thetas[i] = std::numbers::pi * i / n;
  const auto re = synthesize_rings(c.re, thetas, 2 * n);
  const auto im = synthesize_rings(c.im, thetas, 2 * n);
  double s = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) s = std::max(s, std::hypot(re[i], im[i]));
  return s;
}

double fitted_order(std::span<const int> ks, std::span<const double> r, double floor) {
  const std::size_t n = ks.size();
  if (n < 2 || r.size() != n) throw PreconditionError("fitted_order: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(double(ks[i]));
    const double y = std::log(std::max(r[i], floor));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return -(n * sxy - sx * sy) / denom;
}

ConvergenceRecord axiom_report(const QuantizationFamily& family, std::span<const int> ks,
                               const SphereFunction& f, const SphereFunction& g,
                               const CocycleCandidate& c) {
  if (ks.size() < 3) throw PreconditionError("axiom_report: need at least three levels");
  ConvergenceRecord rec;
  rec.ks.assign(ks.begin(), ks.end());
  const SphereFunction fg = multiply(f, g);
  const SphereFunction bracket = poisson_bracket(f, g);
  const double f_sup = sup_norm(f);
  for (int k : ks) {
    const auto q = family(k);
    const double hbar = q->hbar();
    const SphereFunction inputs[] = {f, g, fg, bracket, c.re, c.im};
    const auto ops = q->quantize_all(inputs);
    const auto& tf = ops[0];
    const auto& tg = ops[1];
    std::array<double, 5> r{};
    r[0] = std::max(0.0, f_sup - operator_norm(tf));
    r[1] = operator_norm(HermitianOperator(double(k) * i_commutator(tf, tg).matrix()) - ops[3]);
    const ComplexMatrix p3 = tf * tg - ops[2].matrix() -
                             hbar * (ops[4].matrix() + Complex(0.0, 1.0) * ops[5].matrix());
    r[2] = operator_norm(p3);
    r[3] = std::abs(tf.trace() / k - f.mean());
    r[4] = sup_norm(q->base().dequantize(tf) - f);
    rec.residuals.push_back(r);
  }
  for (int a = 0; a < 5; ++a) {
    std::vector<double> col;
    for (const auto& r : rec.residuals) col.push_back(r[a]);
    rec.slopes[a] = fitted_order(ks, col);
  }
  return rec;
}

} // namespace btq
