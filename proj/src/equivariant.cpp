#include "btq/equivariant.hpp"
#include "btq/smearing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace btq {

double equivariance_defect(const Quantization& q) {
  const int band = std::min(3, q.symbol_budget());
  SphereFunction f(band);
  // A generic low-degree symbol touching several m.
  for (int l = 1; l <= band; ++l)
    for (int m = -l; m <= l; ++m) f.coeff(l, m) = std::sin(1.3 * l + 0.7 * m + 0.4);
  const HermitianOperator qf = q.quantize(f);
  const double scale = std::max(operator_norm(qf), 1e-300);
  double defect = 0.0;
  const double angle = 0.7;
  for (int axis = 0; axis < 3; ++axis) {
    const Eigen::Vector3d n = Eigen::Vector3d::Unit(axis);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, n).toRotationMatrix();
    const ComplexMatrix u = spin_rotation(q.level(), n, angle);
    const ComplexMatrix diff = q.quantize(rotate(f, r)).matrix() - u * qf.matrix() * u.adjoint();
    defect = std::max(defect, operator_norm(diff) / scale);
  }
  return defect;
}

EquivariantQuantization extract_multipliers(const Quantization& q, int max_l, double tol) {
  const double defect = equivariance_defect(q);
  if (!(defect <= tol)) {
    std::ostringstream msg;
    msg << "extract_multipliers: quantization is not SU(2)-equivariant (defect " << defect << ")";
    throw PreconditionError(msg.str());
  }
  const int top = max_l < 0 ? std::min(q.level(), q.symbol_budget()) : max_l;
  if (top > std::min(q.level(), q.symbol_budget()))
    throw PreconditionError("extract_multipliers: max_l exceeds min(k, budget)");
  const auto& t = q.base();
  EquivariantQuantization e;
  e.k = q.level();
  for (int l = 0; l <= top; ++l) {
    std::vector<SphereFunction> ys;
    for (int m = -l; m <= l; ++m) ys.push_back(SphereFunction::harmonic(l, m));
    const auto qs = q.quantize_all(ys);
    const HermitianOperator t0 = t.toeplitz(ys[l]);
    const double ml = hs_inner(qs[l], t0) / hs_inner(t0, t0);
    double res = 0.0;
    for (int m = -l; m <= l; ++m) {
      const HermitianOperator tm = t.toeplitz(ys[m + l]);
      res = std::max(res, operator_norm(qs[m + l] - ml * tm) / operator_norm(tm));
    }
    e.multipliers.push_back(ml);
    e.schur_residuals.push_back(res);
  }
  return e;
}

MultiplierQuantizer::MultiplierQuantizer(std::shared_ptr<const ToeplitzQuantizer> base,
                                         std::vector<double> m)
    : base_(std::move(base)), m_(std::move(m)) {
  if (!base_) throw PreconditionError("MultiplierQuantizer: missing base");
}

HermitianOperator MultiplierQuantizer::quantize(const SphereFunction& f) const {
  if (f.band_limit() >= static_cast<int>(m_.size()))
    throw PreconditionError("MultiplierQuantizer: no multiplier for the symbol's band");
  SphereFunction g = f;
  for (int l = 0; l <= f.band_limit(); ++l)
    for (int m = -l; m <= l; ++m) g.coeff(l, m) *= m_[l];
  return base_->toeplitz(g);
}

LegendreResidual legendre_identity_check(int n) {
  if (n < 1) throw PreconditionError("legendre_identity_check: n must be >= 1");
  const double qn = (n + 1.0) / (2.0 * n + 1.0);
  const double rn = 1.0 - qn;
  const double sn = 2.0 * n * (n + 1.0) / (2.0 * n + 1.0);
  const SphereFunction p1 = legendre(1);
  const SphereFunction pn = legendre(n);
  LegendreResidual r;
  r.product = sup_norm(multiply(p1, pn) - qn * legendre(n + 1) - rn * legendre(n - 1));
  r.gradient = sup_norm(grad_pairing(p1, pn) - sn * (legendre(n - 1) - legendre(n + 1)));
  return r;
}

namespace {

// mu - 1 from beta_n = -n(n+1)(mu-1)/2 by least squares.
double fit_beta(const std::vector<double>& beta, int n_max, double* misfit) {
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double c = 0.5 * n * (n + 1.0);
    num += -c * beta[n];
    den += c * c;
  }
  const double mu1 = num / den;
  if (misfit) {
    *misfit = 0.0;
    for (int n = 1; n <= n_max; ++n)
      *misfit = std::max(*misfit, std::abs(beta[n] + 0.5 * n * (n + 1.0) * mu1));
  }
  return mu1;
}

std::vector<double> scaled_alpha(const EquivariantQuantization& e, int n_max) {
  if (static_cast<int>(e.multipliers.size()) <= n_max)
    throw PreconditionError("fit_mu: multipliers do not reach n_max");
  std::vector<double> beta(n_max + 1);
  for (int n = 0; n <= n_max; ++n) beta[n] = e.k * e.alpha(n);
  return beta;
}

} // namespace

double level_mu(const EquivariantQuantization& e, int n_max) {
  // k alpha_n = -c_n (mu - 1) + gamma c_n^2 / k with c_n = n(n+1)/2; the second column
  // absorbs the O(hbar^2) curvature so mu carries only an O(hbar^2) error.
  const auto beta = scaled_alpha(e, n_max);
  Eigen::MatrixXd a(n_max, 2);
  Eigen::VectorXd b(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double c = 0.5 * n * (n + 1.0);
    a(n - 1, 0) = -c;
    a(n - 1, 1) = c * c / e.k;
    b(n - 1) = beta[n];
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  return 1.0 + x(0);
}

MuFit fit_mu(std::span<const EquivariantQuantization> levels, int n_max) {
  if (levels.size() < 2) throw PreconditionError("fit_mu: need at least two levels");
  std::vector<const EquivariantQuantization*> sorted;
  for (const auto& e : levels) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->k < b->k; });
  const auto& lo = *sorted[sorted.size() - 2];
  const auto& hi = *sorted.back();
  if (lo.k == hi.k) throw PreconditionError("fit_mu: degenerate fit, repeated level");
  // beta(k) = beta_inf + gamma / k; eliminate gamma.
  const auto b1 = scaled_alpha(lo, n_max);
  const auto b2 = scaled_alpha(hi, n_max);
  std::vector<double> beta(n_max + 1);
  for (int n = 0; n <= n_max; ++n) beta[n] = (hi.k * b2[n] - lo.k * b1[n]) / (hi.k - lo.k);
  MuFit fit;
  fit.mu = 1.0 + fit_beta(beta, n_max, &fit.fit_residual);
  for (const auto* e : sorted) {
    double worst = 0.0;
    for (int n = 2; n <= n_max; ++n) {
      const double lhs = e->alpha(n - 1) - e->alpha(n) - e->alpha(1);
      worst = std::max(worst, std::abs(lhs - (n + 1.0) * (fit.mu - 1.0) / e->k));
    }
    fit.recursion_residuals.push_back(worst);
  }
  return fit;
}

ClassificationReport classify(const QuantizationFamily& family, std::span<const int> ks,
                              const ClassifyOptions& options) {
  ClassificationReport rep;
  std::vector<QuantizationPtr> qs;
  try {
    for (int k : ks) {
      qs.push_back(family(k));
      rep.levels.push_back(
          extract_multipliers(*qs.back(), options.n_max, options.equivariance_tol));
    }
  } catch (const PreconditionError& e) {
    rep.verdict = "non-equivariant";
    rep.povm = false;
    rep.mu = rep.t = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.fit = fit_mu(rep.levels, options.n_max);
  rep.mu = rep.fit.mu;
  rep.t = (rep.mu - 1.0) / 4.0;
  if (rep.mu < 1.0 - options.mu_tol) {
    rep.povm = false;
    rep.verdict = "non-POVM";
    rep.exponent = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const SphereFunction tests[] = {SphereFunction::coordinate(2), legendre(2), legendre(3),
                                  parse_function("x*y")};
  std::vector<int> levels(ks.begin(), ks.end());
  std::vector<double> residuals;
  bool all_zero = true;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    EquivalenceRow row;
    row.k = qs[i]->level();
    // Any t' = t + O(hbar) gives the same equivalence class, so each level is compared
    // with its own fit.
    row.t_level = std::max(0.0, (level_mu(rep.levels[i], options.n_max) - 1.0) / 4.0);
    const auto base = std::make_shared<ToeplitzQuantizer>(qs[i]->base());
    const HeatQuantizer heat(base, row.t_level);
    for (const auto& f : tests)
      row.residual = std::max(row.residual, operator_norm(qs[i]->quantize(f) - heat.quantize(f)));
    all_zero = all_zero && row.residual <= options.zero_residual;
    residuals.push_back(row.residual);
    rep.rows.push_back(row);
  }
  rep.exponent = all_zero ? std::numeric_limits<double>::infinity()
                          : fitted_order(levels, residuals);
  const bool equivalent = all_zero || rep.exponent >= options.exponent_min;
  if (!equivalent)
    rep.verdict = "not-equivalent";
  else if (std::abs(rep.t) <= 1e-8)
    rep.verdict = "equivalent-to-standard";
  else
    rep.verdict = "equivalent-to-heat";
  return rep;
}

std::string format_report(const ClassificationReport& r) {
  std::ostringstream s;
  s.precision(17);
  s << "mu " << r.mu << "\n";
  s << "t " << r.t << "\n";
  s << "exponent " << r.exponent << "\n";
  s << "verdict " << r.verdict << "\n";
  for (const auto& row : r.rows)
    s << "level " << row.k << " t_level " << row.t_level << " residual " << row.residual << "\n";
  for (std::size_t i = 0; i < r.fit.recursion_residuals.size(); ++i)
    s << "recursion " << r.levels[i].k << " " << r.fit.recursion_residuals[i] << "\n";
  return s.str();
}

} // namespace btq
