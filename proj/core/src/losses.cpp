#include "sketchdist/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sketchdist/edt.hpp"

namespace sketchdist {

namespace {

void require_weight(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be a finite value >= 0");
  }
}

double mean_over(std::vector<double>& terms, std::size_t denominator) {
  if (denominator == 0) return 0.0;
  return pairwise_sum(terms) / static_cast<double>(denominator);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

void LossWeights::validate() const {
  require_weight(lambda_b, "lambda_B");
  require_weight(lambda_d, "lambda_D");
  require_weight(lambda_v1, "lambda_V1");
  require_weight(lambda_v2, "lambda_V2");
  require_weight(lambda_v3, "lambda_V3");
  require_weight(lambda_d_ineq, "lambda_D_ineq");
}

IneqMode parse_ineq_mode(std::string_view text) {
  if (text == "theorem" || text == "theorem_consistent") return IneqMode::kTheoremConsistent;
  if (text == "paper" || text == "paper_literal") return IneqMode::kPaperLiteral;
  throw Error(ErrorCode::kInvalidArgument, "unknown inequality mode '" + std::string(text) + "'");
}

std::string_view to_string(IneqMode mode) {
  return mode == IneqMode::kTheoremConsistent ? "theorem_consistent" : "paper_literal";
}

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kLeaf = 8;
  if (terms.size() <= kLeaf) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

ScalarField weight_field(const LabelField& gt, double w_b, double sigma_rho) {
  if (!(sigma_rho > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma_rho must be positive");
  const auto to_e = distance_to_sites(edges_to_sites(boundary_edges(gt)), gt.width(), gt.height());
  ScalarField rho(gt.width(), gt.height(), 1.0);
  const double denom = 2.0 * sigma_rho * sigma_rho;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (to_e.squared[i] == kInfiniteSquaredDistance) continue;
    const double dist_sq = static_cast<double>(to_e.squared[i]) / 4.0;
    rho[i] = 1.0 + w_b * std::exp(-dist_sq / denom);
  }
  return rho;
}

LossValue loss_boundary(const ScalarField& b, const ScalarField& b_star, const ScalarField& rho,
                        double lambda_b) {
  require_same_shape(b, b_star, "loss_boundary");
  require_same_shape(b, rho, "loss_boundary");
  std::vector<double> terms(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double t = b[i];
    const double y = b_star[i];
    terms[i] = std::max(t, 0.0) - t * y + std::log1p(std::exp(-std::abs(t)));
  }
  return {lambda_b * mean_over(terms, b.size()), std::nullopt, std::nullopt};
}

LossValue loss_distance(const ScalarField& d, const ScalarField& d_star, const ScalarField& rho,
                        double lambda_d) {
  require_same_shape(d, d_star, "loss_distance");
  require_same_shape(d, rho, "loss_distance");
  std::vector<double> terms(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d[i] - d_star[i];
    terms[i] = e * e * rho[i];
  }
  return {lambda_d * mean_over(terms, d.size()), std::nullopt, std::nullopt};
}

LossValue loss_flow_mse(const VectorField& v, const VectorField& v_star, const ScalarField& rho,
                        double lambda_v1) {
  require_same_shape(v.vx, v_star.vx, "loss_flow_mse");
  require_same_shape(v.vx, rho, "loss_flow_mse");
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double ex = v.vx[i] - v_star.vx[i];
    const double ey = v.vy[i] - v_star.vy[i];
    terms[i] = (ex * ex + ey * ey) * rho[i];
  }
  return {lambda_v1 * mean_over(terms, v.size()), std::nullopt, std::nullopt};
}

LossValue loss_flow_norm(const VectorField& v, const VectorField& v_star, const ScalarField& rho,
                         double lambda_v2) {
  require_same_shape(v.vx, v_star.vx, "loss_flow_norm");
  require_same_shape(v.vx, rho, "loss_flow_norm");
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double e = std::hypot(v.vx[i], v.vy[i]) - std::hypot(v_star.vx[i], v_star.vy[i]);
    terms[i] = e * e * rho[i];
  }
  return {lambda_v2 * mean_over(terms, v.size()), std::nullopt, std::nullopt};
}

LossValue loss_euler(const VectorField& v, const VectorField& v_star, double dt, int steps,
                     double lambda_v3) {
  require_same_shape(v.vx, v_star.vx, "loss_euler");
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 1");
  std::vector<double> terms(v.size());
  std::size_t i = 0;
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x, ++i) {
      Point p{static_cast<double>(x), static_cast<double>(y)};
      Point q = p;
      double s = 0.0;
      for (int l = 0; l < steps; ++l) {
        p = euler_step(v, p, dt);
        q = euler_step(v_star, q, dt);
        const double ex = p.x - q.x;
        const double ey = p.y - q.y;
        s += ex * ex + ey * ey;
      }
      terms[i] = s;
    }
  }
  return {lambda_v3 * mean_over(terms, v.size()), std::nullopt, std::nullopt};
}

LossValue loss_distance_partial(const ScalarField& d, const SupervisionTargets& targets,
                                double lambda_d) {
  require_same_shape(d, targets.d_star, "loss_distance_partial");
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) n += (targets.valid[i] || targets.s0[i]) ? 1 : 0;
  ScalarField grad(d.width(), d.height(), 0.0);
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!targets.valid[i] && !targets.s0[i]) continue;
    const double e = d[i] - targets.d_star[i];
    terms.push_back(e * e);
    grad[i] = 2.0 * lambda_d * e / static_cast<double>(n);
  }
  return {lambda_d * mean_over(terms, n), std::move(grad), std::nullopt};
}

LossValue loss_flow_partial(const VectorField& v, const SupervisionTargets& targets,
                            double lambda_v1) {
  require_same_shape(v.vx, targets.v_star.vx, "loss_flow_partial");
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) n += (targets.flow_valid[i] || targets.s0[i]) ? 1 : 0;
  VectorField grad(v.width(), v.height());
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!targets.flow_valid[i] && !targets.s0[i]) continue;
    const double ex = v.vx[i] - targets.v_star.vx[i];
    const double ey = v.vy[i] - targets.v_star.vy[i];
    terms.push_back(ex * ex + ey * ey);
    grad.vx[i] = 2.0 * lambda_v1 * ex / static_cast<double>(n);
    grad.vy[i] = 2.0 * lambda_v1 * ey / static_cast<double>(n);
  }
  return {lambda_v1 * mean_over(terms, n), std::nullopt, std::move(grad)};
}

LossValue loss_distance_ineq(const ScalarField& d, const SupervisionTargets& targets,
                             double lambda, IneqMode mode) {
  require_same_shape(d, targets.lower_bound, "loss_distance_ineq");
  const std::size_t n = count(targets.s1);
  // d(excess)/dd
  const double slope = mode == IneqMode::kTheoremConsistent ? -1.0 : 1.0;
  ScalarField grad(d.width(), d.height(), 0.0);
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!targets.s1[i]) continue;
    const double excess = slope * (d[i] - targets.lower_bound[i]);
    const double r = relu(excess);
    terms.push_back(r * r);
    grad[i] = 2.0 * lambda * r * slope / static_cast<double>(n);
  }
  return {lambda * mean_over(terms, n), std::move(grad), std::nullopt};
}

SketchposeLoss sketchpose_total(const ScalarField& d, const VectorField& v,
                                const SupervisionTargets& targets, const LossWeights& weights,
                                IneqMode mode) {
  weights.validate();
  require_same_shape(d, v.vx, "sketchpose_total");
  SketchposeLoss out;
  out.distance_partial = loss_distance_partial(d, targets, weights.lambda_d);
  out.flow_partial = loss_flow_partial(v, targets, weights.lambda_v1);
  out.distance_ineq = loss_distance_ineq(d, targets, weights.lambda_d_ineq, mode);

  ScalarField grad_d = *out.distance_partial.grad_d;
  const auto& ineq = *out.distance_ineq.grad_d;
  for (std::size_t i = 0; i < grad_d.size(); ++i) grad_d[i] += ineq[i];
  out.total.value =
      out.distance_partial.value + out.flow_partial.value + out.distance_ineq.value;
  out.total.grad_d = std::move(grad_d);
  out.total.grad_v = out.flow_partial.grad_v;
  return out;
}

OmniposeLoss omnipose_total(const ScalarField& b, const ScalarField& d, const VectorField& v,
                            const FullTargets& full, const ScalarField& rho,
                            const LossWeights& weights, double dt, int steps) {
  weights.validate();
  const auto& t = full.targets;
  OmniposeLoss out;
  out.boundary = loss_boundary(b, full.b_star, rho, weights.lambda_b).value;
  out.distance = loss_distance(d, t.d_star, rho, weights.lambda_d).value;
  out.flow_mse = loss_flow_mse(v, t.v_star, rho, weights.lambda_v1).value;
  out.flow_norm = loss_flow_norm(v, t.v_star, rho, weights.lambda_v2).value;
  out.euler = loss_euler(v, t.v_star, dt, steps, weights.lambda_v3).value;
  out.total = out.boundary + out.distance + out.flow_mse + out.flow_norm + out.euler;
  return out;
}

}  // namespace sketchdist
