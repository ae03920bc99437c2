#include "btq/smearing.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace btq {

namespace {

void require_base(const ToeplitzPtr& base) {
  if (!base) throw PreconditionError("smeared quantizer: missing base quantizer");
}

} // namespace

// ---------------------------------------------------------------------------
// Heat and metaplectic

HeatQuantizer::HeatQuantizer(ToeplitzPtr base, double t) : base_(std::move(base)), t_(t) {
  require_base(base_);
  if (!(t >= 0.0)) throw PreconditionError("heat_quantizer: t must be non-negative");
}

HermitianOperator HeatQuantizer::quantize(const SphereFunction& f) const {
  return base_->toeplitz(heat_flow(f, t_ * hbar()));
}

std::string HeatQuantizer::describe() const {
  std::ostringstream s;
  s.precision(17);
  s << "heat:" << t_;
  return s.str();
}

MetaplecticQuantizer::MetaplecticQuantizer(ToeplitzPtr base) : base_(std::move(base)) {
  require_base(base_);
}

HermitianOperator MetaplecticQuantizer::quantize(const SphereFunction& f) const {
  return base_->toeplitz(f + (0.25 * hbar()) * laplacian(f));
}

// ---------------------------------------------------------------------------
// Vector-field twist

Eigen::Vector3d VectorField::at(const Eigen::Vector3d& p) const {
  Eigen::Vector3d v = rotation.cross(p);
  if (potential) v += gradient_at(*potential, SpherePoint::from_ambient(p));
  return v;
}

SphereFunction VectorField::divergence() const {
  if (!potential) return SphereFunction(0);
  return -1.0 * laplacian(*potential);
}

Eigen::Vector3d flow(const VectorField& v, const Eigen::Vector3d& p, double s, int steps) {
  if (v.is_rotation()) {
    const double speed = v.rotation.norm();
    if (speed == 0.0) return p;
    return Eigen::AngleAxisd(s * speed, v.rotation / speed) * p;
  }
  const double h = s / steps;
  Eigen::Vector3d y = p;
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector3d k1 = v.at(y);
    const Eigen::Vector3d k2 = v.at((y + 0.5 * h * k1).normalized());
    const Eigen::Vector3d k3 = v.at((y + 0.5 * h * k2).normalized());
    const Eigen::Vector3d k4 = v.at((y + h * k3).normalized());
    y = (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).normalized();
  }
  return y;
}

TwistQuantizer::TwistQuantizer(ToeplitzPtr base, VectorField v)
    : base_(std::move(base)), v_(std::move(v)), rotation_(Eigen::Matrix3d::Identity()) {
  require_base(base_);
  const double hbar = 1.0 / base_->level();
  if (v_.is_rotation()) {
    const double speed = v_.rotation.norm();
    if (speed > 0.0)
      rotation_ = Eigen::AngleAxisd(hbar * speed, v_.rotation / speed).toRotationMatrix();
    return;
  }
  const auto& grid = base_->grid();
  pulled_.reserve(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q)
    pulled_.push_back(flow(v_, grid.node(q).ambient(), -hbar));
}

HermitianOperator TwistQuantizer::quantize(const SphereFunction& f) const {
  return quantize_all(std::span(&f, 1)).front();
}

std::vector<HermitianOperator> TwistQuantizer::quantize_all(
    std::span<const SphereFunction> fs) const {
  std::vector<HermitianOperator> out;
  out.reserve(fs.size());
  if (v_.is_rotation()) {
    // f o phi_{-hbar} = f o R^{-1} with R the time-hbar rotation.
    for (const auto& f : fs) out.push_back(base_->toeplitz(rotate(f, rotation_)));
    return out;
  }
  for (const auto& f : fs)
    if (f.band_limit() > base_->budget())
      throw PreconditionError("twist: symbol band exceeds quantizer budget");
  std::vector<std::vector<double>> samples(fs.size(), std::vector<double>(pulled_.size()));
  std::vector<double> vals(fs.size());
  for (std::size_t q = 0; q < pulled_.size(); ++q) {
    evaluate_many(fs, pulled_[q], vals);
    for (std::size_t i = 0; i < fs.size(); ++i) samples[i][q] = vals[i];
  }
  for (const auto& s : samples) out.push_back(base_->toeplitz_samples(s));
  return out;
}

// ---------------------------------------------------------------------------
// rho fields

RhoField::RhoField(Fn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

RhoField RhoField::zero() {
  return {[](const SpherePoint&) { return Eigen::Matrix2d::Zero().eval(); }, "zero"};
}

RhoField RhoField::iso(double s) {
  if (!(s >= 0.0)) throw PreconditionError("rho iso: s must be non-negative");
  std::ostringstream label;
  label.precision(17);
  label << "iso:" << s;
  return {[s](const SpherePoint&) { return (s * Eigen::Matrix2d::Identity()).eval(); },
          label.str()};
}

RhoField RhoField::zz(double s) {
  if (!(s >= 0.0)) throw PreconditionError("rho zz: s must be non-negative");
  std::ostringstream label;
  label.precision(17);
  label << "zz:" << s;
  return {[s](const SpherePoint& p) {
            // dz(sqrt2 e_theta) = -sqrt2 sin(theta), dz(e_phi) = 0.
            const double st = std::sin(p.theta);
            Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
            r(0, 0) = 2.0 * s * st * st;
            return r;
          },
          label.str()};
}

RhoField RhoField::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("rho csv: cannot open " + path);
  std::vector<Eigen::Vector3d> where;
  std::vector<Eigen::Matrix2d> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream row(line);
    double th, ph, r11, r12, r22;
    if (!(row >> th >> ph >> r11 >> r12 >> r22)) continue;  // header or malformed
    where.push_back(SpherePoint{th, ph}.ambient());
    Eigen::Matrix2d r;
    r << r11, r12, r12, r22;
    values.push_back(r);
  }
  if (values.empty()) throw PreconditionError("rho csv: no rows in " + path);
  return {[where, values](const SpherePoint& p) {
            const Eigen::Vector3d x = p.ambient();
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < where.size(); ++i) {
              const double d = (where[i] - x).squaredNorm();
              if (d < bd) {
                bd = d;
                best = i;
              }
            }
            return values[best];
          },
          "csv:" + path};
}

Eigen::Matrix2d RhoField::operator()(const SpherePoint& p) const {
  const Eigen::Matrix2d r = fn_(p);
  if (std::abs(r(0, 1) - r(1, 0)) > 1e-12) throw PreconditionError("rho: not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r);
  if (es.eigenvalues()(0) < -1e-12) throw PreconditionError("rho: not positive semidefinite");
  return r;
}

// ---------------------------------------------------------------------------
// Markov kernel

double cutoff(double r, double epsilon) {
  const double half = 0.5 * epsilon;
  if (r <= half) return 1.0;
  if (r >= epsilon) return 0.0;
  const auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double s = (r - half) / half;
  return h(1.0 - s) / (h(1.0 - s) + h(s));
}

namespace {

struct GaussHermite {
  std::vector<double> x;
  std::vector<double> w;
};

// Golub-Welsch for weight e^{-x^2}.
const GaussHermite& gauss_hermite(int n) {
  static std::mutex mutex;
  static std::map<int, GaussHermite> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) jac(i, i - 1) = jac(i - 1, i) = std::sqrt(0.5 * i);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussHermite gh;
  for (int i = 0; i < n; ++i) {
    gh.x.push_back(es.eigenvalues()(i));
    const double v0 = es.eigenvectors()(0, i);
    gh.w.push_back(std::sqrt(std::numbers::pi) * v0 * v0);
  }
  return cache.emplace(n, std::move(gh)).first->second;
}

} // namespace

std::vector<KernelSample> markov_kernel(const SpherePoint& x0, const Eigen::Matrix2d& rho, double t,
                                        const MarkovOptions& options) {
  if (!(t > 0.0)) throw PreconditionError("markov kernel: t must be positive");
  if (!(options.epsilon > 0.0 && options.epsilon < std::numbers::pi))
    throw PreconditionError("markov kernel: epsilon must lie in (0, pi)");
  // A_t = t(-pi J rho J + t) with J the rotation compatible with g_p and omega.
  Eigen::Matrix2d j;
  j << 0.0, 1.0, -1.0, 0.0;
  const Eigen::Matrix2d a = t * (-std::numbers::pi * j * rho * j + t * Eigen::Matrix2d::Identity());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  const Eigen::Matrix2d v = es.eigenvectors();
  const double scale[2] = {std::sqrt(std::max(0.0, es.eigenvalues()(0)) / std::numbers::pi),
                           std::sqrt(std::max(0.0, es.eigenvalues()(1)) / std::numbers::pi)};
  const auto& gh = gauss_hermite(options.gh_order);
  const Eigen::Vector3d p = x0.ambient();
  const Eigen::Vector3d et = x0.e_theta();
  const Eigen::Vector3d ep = x0.e_phi();
  std::vector<KernelSample> out;
  out.reserve(gh.x.size() * gh.x.size());
  double total = 0.0;
  for (std::size_t a1 = 0; a1 < gh.x.size(); ++a1) {
    for (std::size_t a2 = 0; a2 < gh.x.size(); ++a2) {
      // Normal coordinates Z (g_p-orthonormal); exp(-pi <A^{-1} Z, Z>) = exp(-|X|^2).
      const Eigen::Vector2d z = v * Eigen::Vector2d(scale[0] * gh.x[a1], scale[1] * gh.x[a2]);
      const double zn = z.norm();
      const double dist = std::numbers::sqrt2 * zn;  // round distance
      const double w = gh.w[a1] * gh.w[a2] * cutoff(dist, options.epsilon);
      if (w <= 0.0) continue;
      Eigen::Vector3d point = p;
      if (zn > 0.0)
        point = std::cos(dist) * p + std::sin(dist) * (z(0) * et + z(1) * ep) / zn;
      out.push_back({point, w});
      total += w;
    }
  }
  for (auto& s : out) s.weight /= total;
  return out;
}

std::vector<double> markov_smear_samples(const SphereFunction& f, const RhoField& rho, double t,
                                         std::span<const SpherePoint> points,
                                         const MarkovOptions& options) {
  std::vector<double> out(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) {
    double s = 0.0;
    for (const auto& ks : markov_kernel(points[q], rho(points[q]), t, options))
      s += ks.weight * evaluate(f, ks.point);
    out[q] = s;
  }
  return out;
}

SphereFunction markov_smear_apply(const SphereFunction& f, const RhoField& rho, double t, int band,
                                  const MarkovOptions& options) {
  const auto& grid = cached_grid(2 * band);
  const auto nodes = grid.nodes();
  return project(markov_smear_samples(f, rho, t, nodes, options), grid, band);
}

MarkovQuantizer::MarkovQuantizer(ToeplitzPtr base, RhoField rho, std::optional<double> t,
                                 MarkovOptions options)
    : base_(std::move(base)), rho_(std::move(rho)), t_(0.0), options_(options) {
  require_base(base_);
  t_ = t.value_or(1.0 / base_->level());
  if (!(t_ > 0.0)) throw PreconditionError("markov quantizer: t must be positive");
}

HermitianOperator MarkovQuantizer::quantize(const SphereFunction& f) const {
  return quantize_all(std::span(&f, 1)).front();
}

std::vector<HermitianOperator> MarkovQuantizer::quantize_all(
    std::span<const SphereFunction> fs) const {
  for (const auto& f : fs)
    if (f.band_limit() > base_->budget())
      throw PreconditionError("markov: symbol band exceeds quantizer budget");
  const auto& grid = base_->grid();
  std::vector<std::vector<double>> samples(fs.size(), std::vector<double>(grid.size(), 0.0));
  std::vector<double> vals(fs.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const SpherePoint x0 = grid.node(q);
    for (const auto& ks : markov_kernel(x0, rho_(x0), t_, options_)) {
      evaluate_many(fs, ks.point, vals);
      for (std::size_t i = 0; i < fs.size(); ++i) samples[i][q] += ks.weight * vals[i];
    }
  }
  std::vector<HermitianOperator> out;
  out.reserve(fs.size());
  for (const auto& s : samples) out.push_back(base_->toeplitz_samples(s));
  return out;
}

// ---------------------------------------------------------------------------

PositivityWitness positivity_witness(const Quantization& q, int max_degree) {
  std::vector<std::pair<std::string, SphereFunction>> candidates;
  const SphereFunction one = SphereFunction::constant(1.0);
  const SphereFunction z = SphereFunction::coordinate(2);
  SphereFunction power = one;
  const SphereFunction half_up = 0.5 * (one + z);
  for (int p = 1; p <= max_degree; ++p) {
    power = multiply(power, half_up);
    candidates.emplace_back("((1+z)/2)^" + std::to_string(p), power);
  }
  for (int n = 1; n <= max_degree; ++n) {
    candidates.emplace_back("(1+P" + std::to_string(n) + ")/2", 0.5 * (one + legendre(n)));
    candidates.emplace_back("(1-P" + std::to_string(n) + ")/2", 0.5 * (one - legendre(n)));
  }
  PositivityWitness best;
  best.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& [name, f] : candidates) {
    if (f.band_limit() > q.symbol_budget()) continue;
    const double fmin = sample_extrema(f).min;
    if (fmin < -1e-12) continue;
    const double e = min_eigenvalue(q.quantize(f));
    if (e < best.min_eigenvalue) best = {name, fmin, e};
  }
  return best;
}

} // namespace btq
