// One PASS/FAIL line per acceptance criterion; exit status is non-zero if any fails.

#include "btq/equivariant.hpp"
#include "btq/povm_measure.hpp"
#include "btq/smearing.hpp"
#include "btq/unsharpness.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace btq;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) detail << " [violated: " << what << "]";
  }
};

std::shared_ptr<const ToeplitzQuantizer> toeplitz(int k) { return std::make_shared<ToeplitzQuantizer>(k); }

double max_entry_error(const MetricField& field, const std::function<Eigen::Matrix2d(const SpherePoint&)>& g) {
  double err = 0.0;
  for (std::size_t i = 0; i < field.G.size(); ++i)
    err = std::max(err, (field.G[i] - g(field.points[i])).cwiseAbs().maxCoeff());
  return err;
}

// Reconstructed metrics shared between criteria.
struct MetricRun {
  std::string name;
  MetricField field;
  double total = 0.0;
};

std::vector<MetricRun>& metric_runs() {
  static std::vector<MetricRun> runs;
  return runs;
}

const MetricRun& metric_for(const std::string& name, const std::function<QuantizationPtr(int)>& family) {
  for (const auto& r : metric_runs())
    if (r.name == name) return r;
  MetricRun run;
  run.name = name;
  run.field = metric_reconstruct(*family(64), *family(128));
  run.total = total_unsharpness(run.field);
  metric_runs().push_back(std::move(run));
  return metric_runs().back();
}

QuantizationPtr heat(int k, double t) { return std::make_shared<HeatQuantizer>(toeplitz(k), t); }
QuantizationPtr markov(int k, const RhoField& rho) { return std::make_shared<MarkovQuantizer>(toeplitz(k), rho); }

// ---------------------------------------------------------------------------

void resolution_of_identity(Outcome& o) {
  double worst = 0.0;
  for (int k : {2, 8, 32, 128}) {
    const auto one = toeplitz(k)->toeplitz(SphereFunction::constant(1.0));
    worst = std::max(worst, operator_norm(one.matrix() - ComplexMatrix::Identity(k + 1, k + 1)));
  }
  o.detail << "max |T(1) - I| = " << worst << " over k in {2,8,32,128}";
  o.require(worst <= 1e-10, "<= 1e-10");
}

void closed_form_toeplitz(Outcome& o) {
  double worst = 0.0;
  for (int k : {2, 8, 32, 128}) {
    const auto s = spectrum(toeplitz(k)->toeplitz(SphereFunction::coordinate(2)));
    // Beta integrals give (k - 2m) / (k + 2), listed here in ascending order.
    for (int i = 0; i <= k; ++i) worst = std::max(worst, std::abs(s.values(i) - double(2 * i - k) / (k + 2)));
  }
  o.detail << "max eigenvalue error of T(z) = " << worst;
  o.require(worst <= 1e-10, "<= 1e-10");
}

void berezin_expansion(Outcome& o) {
  const auto z = SphereFunction::coordinate(2);
  for (int k : {8, 32, 128}) {
    const auto b = toeplitz(k)->berezin(z);
    const auto scaled = double(k) * (b - z) + 2.0 * z;
    const double sup = sup_norm(scaled);
    const double closed = sup_norm(scaled - (4.0 / (k + 2)) * z);
    o.detail << "k=" << k << ": sup = " << sup << " (8/k = " << 8.0 / k << ", closed-form gap " << closed << ") ";
    o.require(sup <= 8.0 / k, "sup <= 8/k at k=" + std::to_string(k));
    o.require(closed <= 1e-10, "closed form 4z/(k+2)");
  }
}

void standard_unsharpness(Outcome& o) {
  const auto z = SphereFunction::coordinate(2);
  const auto c = cocycle_extrapolate(cocycle_estimate(*toeplitz(64), z, z), cocycle_estimate(*toeplitz(128), z, z));
  const auto target = -1.0 * (SphereFunction::constant(1.0) - multiply(z, z));
  const double rel = sup_norm(c.plus - target) / sup_norm(target);
  o.detail << "extrapolated c+(z,z) relative sup error = " << rel << " at (64,128)";
  o.require(rel <= 0.05, "<= 5%");
}

void heat_scaling(Outcome& o) {
  for (double t : {0.1, 0.25}) {
    const auto& run = metric_for("heat:" + std::to_string(t), [t](int k) { return heat(k, t); });
    double worst = 0.0;
    for (const auto& g : run.field.G) worst = std::max(worst, std::abs(std::sqrt(g.determinant()) / (1 + 4 * t) - 1));
    const double entries = max_entry_error(run.field, [t](const SpherePoint&) {
      return ((1 + 4 * t) * Eigen::Matrix2d::Identity()).eval();
    }) / (1 + 4 * t);
    o.detail << "t=" << t << ": conformal factor rel err " << worst << ", entrywise rel err " << entries << "; ";
    o.require(worst <= 0.02 && entries <= 0.02, "within 2% at t=" + std::to_string(t));
  }
}

double zz_reference_total(double s) {
  // Independent Gauss-Legendre rule for 2 pi * integral sqrt(1 + 2 s (1 - z^2)) d sigma.
  std::vector<double> z, w;
  btq::testing::legendre_nodes(400, z, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += 0.5 * w[i] * std::sqrt(1 + 2 * s * (1 - z[i] * z[i]));
  return kTwoPi * sum;
}

void markov_construction(Outcome& o) {
  const double s = 0.5;
  const auto& iso = metric_for("markov:iso", [s](int k) { return markov(k, RhoField::iso(s)); });
  const double iso_err = max_entry_error(iso.field, [s](const SpherePoint&) {
    return ((1 + s) * Eigen::Matrix2d::Identity()).eval();
  });
  const double iso_total = (1 + s) * kTwoPi;
  o.detail << "iso: max |G - 1.5 g| = " << iso_err << ", total " << iso.total / iso_total << " x expected; ";
  o.require(iso_err <= 0.075, "iso pointwise within 0.075");
  o.require(std::abs(iso.total / iso_total - 1) <= 0.05, "iso total within 5%");

  const RhoField rho = RhoField::zz(s);
  const auto& zz = metric_for("markov:zz", [&](int k) { return markov(k, rho); });
  double rel = 0.0;
  for (std::size_t i = 0; i < zz.field.G.size(); ++i) {
    const Eigen::Matrix2d expected = Eigen::Matrix2d::Identity() + rho(zz.field.points[i]);
    rel = std::max(rel, (zz.field.G[i] - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff());
  }
  const double ref = zz_reference_total(s);
  o.detail << "rank-one: pointwise rel err " << rel << ", total " << zz.total << " vs " << ref;
  o.require(rel <= 0.07, "rank-one pointwise within 7%");
  o.require(std::abs(zz.total / ref - 1) <= 0.05, "rank-one total within 5%");
}

void least_unsharpness(Outcome& o) {
  VectorField rot;
  rot.rotation = Eigen::Vector3d(0.4, -0.3, 1.0);
  VectorField grad;
  grad.potential = 0.3 * legendre(2) + 0.2 * SphereFunction::harmonic(1, 1);
  metric_for("standard", [](int k) { return toeplitz(k); });
  metric_for("twist:rotation", [&](int k) { return std::make_shared<TwistQuantizer>(toeplitz(k), rot); });
  metric_for("twist:gradient", [&](int k) { return std::make_shared<TwistQuantizer>(toeplitz(k), grad); });
  for (const auto& run : metric_runs()) {
    o.detail << run.name << " " << run.total << "; ";
    o.require(run.total >= kTwoPi - 0.05, run.name + " >= 2 pi - 0.05");
    if (run.name == "standard") o.require(std::abs(run.total / kTwoPi - 1) <= 0.01, "standard within 1% of 2 pi");
  }
}

void noise_inequality(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  double min_slack = 1e300, min_cs = 1e300;
  int trials = 0;
  for (int k : {2, 4, 8}) {
    const ToeplitzQuantizer q(k);
    const DiscretePOVM p = discretize_povm(q);
    const NaimarkDilation d = naimark_dilate(p);
    std::vector<double> u(p.size()), v(p.size());
    for (int i = 0; i < 1000; ++i, ++trials) {
      for (auto& x : u) x = normal(rng);
      for (auto& x : v) x = normal(rng);
      const auto theta = random_density(k + 1, rng());
      min_slack = std::min(min_slack, verify_noise_inequality(p, u, v, theta).slack());
      const double ss = expectation(q_pairing(d, u, u), theta).real();
      const double tt = expectation(q_pairing(d, v, v), theta).real();
      min_cs = std::min(min_cs, ss * tt - std::norm(expectation(q_pairing(d, u, v), theta)));
    }
  }
  o.detail << trials << " trials: min noise slack " << min_slack << ", min q-pairing slack " << min_cs;
  o.require(min_slack >= -1e-10, "noise slack >= -1e-10");
  o.require(min_cs >= -1e-10, "Cauchy-Schwarz slack >= -1e-10");
}

void variance_identity(Outcome& o) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int k : {2, 8, 32}) {
    const ToeplitzQuantizer q(k);
    for (int i = 0; i < 20; ++i) {
      const auto f = btq::testing::random_function(rng, 3);
      worst = std::max(worst, variance_identity_check(q, f, random_density(k + 1, rng())).residual());
    }
  }
  const int k = 128;
  const auto theta = DensityState::pure(coherent_state(k, SpherePoint{std::numbers::pi / 2, 0.0}));
  const double kv = k * variance(toeplitz(k)->toeplitz(SphereFunction::coordinate(2)), theta);
  o.detail << "max identity residual " << worst << ", k Var(T(z), equatorial coherent state) = " << kv;
  o.require(worst <= 1e-10, "identity residual <= 1e-10");
  o.require(std::abs(kv - 1) <= 0.05, "coherent variance within 5% of 1");
}

void legendre_identities(Outcome& o) {
  double prod = 0.0, grad = 0.0;
  for (int n = 1; n <= 40; ++n) {
    const auto r = legendre_identity_check(n);
    prod = std::max(prod, r.product);
    grad = std::max(grad, r.gradient);
  }
  o.detail << "max residuals: product " << prod << ", gradient " << grad;
  o.require(prod <= 1e-8 && grad <= 1e-8, "<= 1e-8");
}

void classification(Outcome& o) {
  const std::vector<int> ks{32, 64, 128};
  const auto h = classify([](int k) { return heat(k, 0.2); }, ks);
  o.detail << "heat(0.2) blind: t = " << h.t << ", exponent " << h.exponent << ", verdict " << h.verdict << "; ";
  o.require(std::abs(h.t / 0.2 - 1) <= 0.05, "t within 5%");
  o.require(h.exponent >= 1.8, "exponent >= 1.8");
  const auto m = classify([](int k) { return std::make_shared<MetaplecticQuantizer>(toeplitz(k)); }, ks);
  o.detail << "metaplectic: mu = " << m.mu << ", verdict " << m.verdict;
  o.require(m.verdict == "non-POVM", "metaplectic verdict non-POVM");
  o.require(std::abs(m.mu) <= 0.05, "mu within 0.05 of 0");
}

void rawnsley(Outcome& o) {
  double density_err = 0.0, mean_err = 0.0, twist_err = 0.0;
  VectorField rot;
  rot.rotation = Eigen::Vector3d(0.4, -0.3, 1.0);
  for (int k : {16, 64, 128}) {
    const auto q = toeplitz(k);
    const auto r = rawnsley_function(*q, 6);
    density_err = std::max(density_err, sup_norm(r.density - SphereFunction::constant(1.0 + 1.0 / k)));
    mean_err = std::max(mean_err, std::abs(r.mean_r - 1));
    const auto rt = rawnsley_function(TwistQuantizer(q, rot), 6);
    twist_err = std::max(twist_err, k * sup_norm(rt.r - r.r));
  }
  o.detail << "sup |R - (1 + hbar)| = " << density_err << ", |<r> - 1| = " << mean_err
           << ", divergence-free twist: max k sup|r_v - r| = " << twist_err;
  o.require(density_err <= 1e-10, "R = 1 + hbar to 1e-10");
  o.require(mean_err <= 1e-10, "<r> = 1");
  o.require(twist_err <= 1.0, "twist changes r by at most hbar");
}

void metaplectic_subprincipal(Outcome& o) {
  const auto z = SphereFunction::coordinate(2), p2 = legendre(2), zp2 = multiply(z, p2);
  std::vector<double> r;
  for (int k : {32, 64, 128}) {
    const MetaplecticQuantizer q(toeplitz(k));
    r.push_back(operator_norm(jordan_product(q.quantize(z), q.quantize(p2)) - q.quantize(zp2)));
  }
  o.detail << "Jordan residuals " << r[0] << ", " << r[1] << ", " << r[2] << "; doubling ratios " << r[0] / r[1]
           << ", " << r[1] / r[2];
  for (int i = 0; i < 2; ++i) o.require(r[i] / r[i + 1] >= 3.2 && r[i] / r[i + 1] <= 4.8, "ratio in [3.2, 4.8]");
}

void cocycle_algebra(Outcome& o) {
  std::mt19937_64 rng(99);
  const std::vector<int> ks{32, 64, 128};
  std::vector<std::shared_ptr<const ToeplitzQuantizer>> qs;
  for (int k : ks) qs.push_back(toeplitz(k));
  double min_h = 1e9, min_l = 1e9;
  for (int trial = 0; trial < 3; ++trial) {
    const auto f1 = btq::testing::random_function(rng, 2), f2 = btq::testing::random_function(rng, 2),
               f3 = btq::testing::random_function(rng, 2);
    std::vector<double> h, l;
    for (const auto& q : qs) {
      h.push_back(hochschild_residual(
          [&](const SphereFunction& a, const SphereFunction& b) { return cocycle_estimate(*q, a, b).full(); }, f1,
          f2, f3));
      l.push_back(leibniz_residual(
          [&](const SphereFunction& a, const SphereFunction& b) { return cocycle_estimate(*q, a, b).plus; }, f1,
          f2, f3));
    }
    // Order between the two finest levels, the same rule the command-line checks use.
    min_h = std::min(min_h, std::log2(h[1] / h[2]));
    min_l = std::min(min_l, std::log2(l[1] / l[2]));
  }
  o.detail << "decay orders at (64,128): Hochschild >= " << min_h << ", Leibniz >= " << min_l << "; ";
  o.require(min_h >= 0.8 && min_l >= 0.8, "O(hbar) decay (order >= 0.8)");

  const auto q64 = toeplitz(64), q128 = toeplitz(128);
  double extrapolated = -1e9, single = -1e9;
  for (int i = 0; i < 20; ++i) {
    const auto f = btq::testing::random_function(rng, 3);
    const auto a = cocycle_estimate(*q64, f, f), b = cocycle_estimate(*q128, f, f);
    extrapolated = std::max(extrapolated, sample_extrema(cocycle_extrapolate(a.plus, b.plus)).max);
    single = std::max(single, sample_extrema(b.plus).max);
  }
  o.detail << "max extrapolated c+(f,f) = " << extrapolated << " (single level k=128: " << single << ")";
  o.require(extrapolated <= 1e-6, "extrapolated c+(f,f) <= 1e-6");
}

} // namespace

int main() {
  const std::pair<const char*, void (*)(Outcome&)> criteria[] = {
      {"resolution of identity", resolution_of_identity},
      {"closed-form Toeplitz operator of z", closed_form_toeplitz},
      {"Berezin transform expansion", berezin_expansion},
      {"unsharpness of the standard quantizer", standard_unsharpness},
      {"heat-smeared metric scaling", heat_scaling},
      {"Markov construction", markov_construction},
      {"least unsharpness", least_unsharpness},
      {"noise inequality", noise_inequality},
      {"variance identity", variance_identity},
      {"Legendre identities", legendre_identities},
      {"classification", classification},
      {"Rawnsley function", rawnsley},
      {"metaplectic sub-principal property", metaplectic_subprincipal},
      {"cocycle algebra", cocycle_algebra},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    o.detail.precision(4);
    const auto start = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
