#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "sketchdist/flowfield.hpp"
#include "sketchdist/raster.hpp"
#include "sketchdist/supervision.hpp"

namespace sketchdist {

struct LossWeights {
  double lambda_b = 10.0;
  double lambda_d = 2.0;
  double lambda_v1 = 2.0;
  double lambda_v2 = 2.0;
  double lambda_v3 = 1.0;
  double lambda_d_ineq = 2.0;

  void validate() const;
};

struct LossValue {
  double value = 0.0;
  std::optional<ScalarField> grad_d;
  std::optional<VectorField> grad_v;
};

/// Direction of the asymmetric distance term.
enum class IneqMode {
  kTheoremConsistent,  // penalize d below the certified lower bound
  kPaperLiteral,       // penalize d above the lower bound
};

IneqMode parse_ineq_mode(std::string_view text);
std::string_view to_string(IneqMode mode);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> terms);

/// rho = 1 + w_b * exp(-dist(x, E)^2 / (2 sigma^2)).
ScalarField weight_field(const LabelField& gt, double w_b = 4.0, double sigma_rho = 2.0);

// Full-annotation reference terms; value only. All are means over |X|.

/// Sigmoid + binary cross entropy on logits. rho is accepted but unused.
LossValue loss_boundary(const ScalarField& b, const ScalarField& b_star, const ScalarField& rho,
                        double lambda_b);
LossValue loss_distance(const ScalarField& d, const ScalarField& d_star, const ScalarField& rho,
                        double lambda_d);
LossValue loss_flow_mse(const VectorField& v, const VectorField& v_star, const ScalarField& rho,
                        double lambda_v1);
LossValue loss_flow_norm(const VectorField& v, const VectorField& v_star, const ScalarField& rho,
                         double lambda_v2);
/// Trajectory deviation summed over l = 1..steps from every pixel center.
LossValue loss_euler(const VectorField& v, const VectorField& v_star, double dt, int steps,
                     double lambda_v3);

// Partial-annotation terms; value and gradient.

/// Mean squared error over valid u S0.
LossValue loss_distance_partial(const ScalarField& d, const SupervisionTargets& targets,
                                double lambda_d);
/// Mean squared vector error over flow_valid u S0.
LossValue loss_flow_partial(const VectorField& v, const SupervisionTargets& targets,
                            double lambda_v1);
/// Squared ReLU against the lower bound, averaged over S1.
LossValue loss_distance_ineq(const ScalarField& d, const SupervisionTargets& targets,
                             double lambda, IneqMode mode = IneqMode::kTheoremConsistent);

struct SketchposeLoss {
  LossValue distance_partial;
  LossValue flow_partial;
  LossValue distance_ineq;
  LossValue total;  // value and accumulated gradients
};

SketchposeLoss sketchpose_total(const ScalarField& d, const VectorField& v,
                                const SupervisionTargets& targets, const LossWeights& weights = {},
                                IneqMode mode = IneqMode::kTheoremConsistent);

struct OmniposeLoss {
  double boundary = 0.0;
  double distance = 0.0;
  double flow_mse = 0.0;
  double flow_norm = 0.0;
  double euler = 0.0;
  double total = 0.0;
};

OmniposeLoss omnipose_total(const ScalarField& b, const ScalarField& d, const VectorField& v,
                            const FullTargets& full, const ScalarField& rho,
                            const LossWeights& weights = {}, double dt = 1.0, int steps = 200);

}  // namespace sketchdist
