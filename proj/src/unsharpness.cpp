#include "btq/unsharpness.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace btq {

CocycleEstimate cocycle_estimate(const Quantization& q, const SphereFunction& f,
                                 const SphereFunction& g) {
  const SphereFunction fs[] = {f, g, multiply(f, g)};
  const auto ops = q.quantize_all(fs);
  const double k = q.level();
  const auto& base = q.base();
  CocycleEstimate out;
  out.k = q.level();
  out.plus = k * base.dequantize(jordan_product(ops[0], ops[1]) - ops[2]);
  out.minus = (0.5 * k) * base.dequantize(i_commutator(ops[0], ops[1]));
  return out;
}

SphereFunction cocycle_extrapolate(const SphereFunction& c_k, const SphereFunction& c_2k) {
  return 2.0 * c_2k - c_k;
}

CocycleEstimate cocycle_extrapolate(const CocycleEstimate& at_k, const CocycleEstimate& at_2k) {
  if (at_2k.k != 2 * at_k.k)
    throw PreconditionError("cocycle_extrapolate: levels must be k and 2k");
  return {at_2k.k, cocycle_extrapolate(at_k.plus, at_2k.plus),
          cocycle_extrapolate(at_k.minus, at_2k.minus)};
}

ComplexFunction standard_cocycle(const SphereFunction& f, const SphereFunction& g) {
  return {-0.5 * grad_pairing(f, g), 0.5 * poisson_bracket(f, g)};
}

namespace {

ComplexFunction times(const SphereFunction& f, const ComplexFunction& c) {
  return {multiply(f, c.re), multiply(f, c.im)};
}

} // namespace

double hochschild_residual(const CocycleFn& c, const SphereFunction& f1, const SphereFunction& f2,
                           const SphereFunction& f3) {
  const ComplexFunction a = times(f1, c(f2, f3));
  const ComplexFunction b = c(multiply(f1, f2), f3);
  const ComplexFunction d = c(f1, multiply(f2, f3));
  const ComplexFunction e = times(f3, c(f1, f2));
  return sup_abs({a.re - b.re + d.re - e.re, a.im - b.im + d.im - e.im});
}

double leibniz_residual(const SymmetricCocycleFn& c_plus, const SphereFunction& f,
                        const SphereFunction& g, const SphereFunction& h) {
  return sup_norm(c_plus(multiply(f, g), h) - multiply(f, c_plus(g, h)) -
                  multiply(g, c_plus(f, h)));
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d tangent_metric(const Eigen::Matrix3d& gram, const SpherePoint& p,
                               const Eigen::Matrix3d& probe_rotation) {
  // sgrad u_i = 2 (e_i x p) for omega = dA / 2; components in the g_p-orthonormal
  // frame are (v . e_a) / sqrt2. Then S^T S = 2 I and M = S G S^T.
  const Eigen::Vector3d x = p.ambient();
  const Eigen::Vector3d ea[2] = {p.e_theta(), p.e_phi()};
  Eigen::Matrix<double, 3, 2> s;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d sg = 2.0 * Eigen::Vector3d::Unit(i).cross(x);
    for (int a = 0; a < 2; ++a) s(i, a) = sg.dot(ea[a]) / std::numbers::sqrt2;
  }
  s = (probe_rotation * s).eval();
  Eigen::Matrix2d g = 0.25 * s.transpose() * gram * s;
  return 0.5 * (g + g.transpose());
}

namespace {

MetricField report_points(int degree) {
  const auto& grid = cached_grid(degree);
  MetricField field;
  field.points = grid.nodes();
  field.weights.resize(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) field.weights[q] = grid.weight(q);
  return field;
}

// Extrapolated -2 c_+(u_i, u_j) for the six probe pairs.
std::array<SphereFunction, 6> probe_gram(const Quantization& q_k, const Quantization& q_2k,
                                         const Eigen::Matrix3d& probe_rotation) {
  std::array<SphereFunction, 3> u;
  for (int i = 0; i < 3; ++i) {
    u[i] = SphereFunction(1);
    for (int j = 0; j < 3; ++j) u[i] += probe_rotation(i, j) * SphereFunction::coordinate(j);
  }
  std::vector<SphereFunction> fs(u.begin(), u.end());
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) fs.push_back(multiply(u[i], u[j]));
  std::array<std::array<SphereFunction, 6>, 2> raw;
  const Quantization* levels[2] = {&q_k, &q_2k};
  for (int lv = 0; lv < 2; ++lv) {
    const auto ops = levels[lv]->quantize_all(fs);
    const double k = levels[lv]->level();
    int idx = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j, ++idx)
        raw[lv][idx] =
            k * levels[lv]->base().dequantize(jordan_product(ops[i], ops[j]) - ops[3 + idx]);
  }
  std::array<SphereFunction, 6> out;
  for (int idx = 0; idx < 6; ++idx) out[idx] = -2.0 * cocycle_extrapolate(raw[0][idx], raw[1][idx]);
  return out;
}

} // namespace

MetricField metric_reconstruct(const Quantization& q_k, const Quantization& q_2k,
                               const MetricOptions& options) {
  if (q_2k.level() != 2 * q_k.level())
    throw PreconditionError("metric_reconstruct: levels must be k and 2k");
  const auto gram = probe_gram(q_k, q_2k, options.probe_rotation);
  MetricField field = report_points(options.report_degree);
  const auto& grid = cached_grid(options.report_degree);
  std::array<std::vector<double>, 6> values;
  for (int idx = 0; idx < 6; ++idx) values[idx] = synthesize(gram[idx], grid);
  field.G.resize(field.points.size());
  for (std::size_t q = 0; q < field.points.size(); ++q) {
    Eigen::Matrix3d m;
    int idx = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j, ++idx) m(i, j) = m(j, i) = values[idx][q];
    field.G[q] = tangent_metric(m, field.points[q], options.probe_rotation);
  }
  return field;
}

MetricField metric_on_grid(const std::function<Eigen::Matrix2d(const SpherePoint&)>& metric,
                           int report_degree) {
  MetricField field = report_points(report_degree);
  field.G.reserve(field.points.size());
  for (const auto& p : field.points) field.G.push_back(metric(p));
  return field;
}

Eigen::Matrix2d omega_matrix() {
  Eigen::Matrix2d o;
  o << 0.0, -1.0, 1.0, 0.0;
  return o;
}

PointDecomposition decompose_point(const Eigen::Matrix2d& G) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G);
  if (!(es.eigenvalues()(0) > 0.0)) throw PreconditionError("decompose_point: G not positive definite");
  const Eigen::Matrix2d omega = omega_matrix();
  PointDecomposition d;
  d.K = omega.inverse() * G;
  d.alpha = std::sqrt(G.determinant());
  d.J = d.K / d.alpha;
  d.rho = G - omega * d.J;
  d.rho = (0.5 * (d.rho + d.rho.transpose())).eval();
  return d;
}

MetricDecomposition metric_decompose(const MetricField& field) {
  MetricDecomposition out;
  out.min_rho_eigenvalue = std::numeric_limits<double>::infinity();
  out.points.reserve(field.G.size());
  for (std::size_t q = 0; q < field.G.size(); ++q) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(field.G[q]);
    if (!(es.eigenvalues()(0) > 0.0)) {
      std::ostringstream msg;
      msg << "metric_decompose: G is not positive definite at point " << q << " (theta "
          << field.points[q].theta << ", phi " << field.points[q].phi << ")";
      throw PreconditionError(msg.str());
    }
    out.points.push_back(decompose_point(field.G[q]));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> rs(out.points.back().rho);
    out.min_rho_eigenvalue = std::min(out.min_rho_eigenvalue, rs.eigenvalues()(0));
  }
  return out;
}

double total_unsharpness(const MetricField& field) {
  double s = 0.0;
  for (std::size_t q = 0; q < field.G.size(); ++q)
    s += field.weights[q] * std::sqrt(std::max(0.0, field.G[q].determinant()));
  return convention::kTotalArea * s;
}

} // namespace btq
