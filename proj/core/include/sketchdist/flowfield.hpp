#pragma once

#include <span>
#include <utility>
#include <vector>

#include "sketchdist/raster.hpp"

namespace sketchdist {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Positions x_0 .. x_L of one explicit Euler trajectory; x_0 is the start.
struct Trajectory {
  Point start;
  std::vector<Point> positions;
  double dt = 1.0;
  int steps = 0;
};

inline constexpr double kFlowEpsilon = 1e-8;

/// Normalized gradient of `d` inside `fg` (central differences, one-sided at
/// fg borders). Zero outside fg and wherever the gradient norm is <= 1e-8.
VectorField flow_from_distance(const ScalarField& d, const PixelSet& fg);

/// Bilinear sample of `v` at a sub-pixel position; samples outside the domain
/// contribute zero.
Point sample_bilinear(const VectorField& v, Point p);

/// One Euler step x + dt * v(x), clamped to [0, W-1] x [0, H-1].
Point euler_step(const VectorField& v, Point p, double dt);

std::vector<Trajectory> euler_integrate(const VectorField& v, std::span<const Point> starts,
                                        double dt, int steps);

/// Every pixel center of a width x height domain in raster order.
std::vector<Point> pixel_centers(int width, int height);

/// Trajectories under the prediction and the target from identical starts.
std::pair<std::vector<Trajectory>, std::vector<Trajectory>> euler_loss_trajectories(
    const VectorField& v, const VectorField& v_star, std::span<const Point> starts, double dt,
    int steps);

struct ReconstructionParams {
  double fg_threshold = 0.0;
  double dt = 1.0;
  int steps = 200;
  int cluster_radius = 1;
  int min_size = 15;

  void validate() const;
};

/// Instance labels from a predicted distance map and flow field: every
/// foreground pixel is advected along the flow, converged positions are
/// clustered by dilated occupancy, and each pixel inherits its cluster id.
/// Clusters smaller than min_size pixels are dropped; labels are compact.
LabelField reconstruct_masks(const ScalarField& d, const VectorField& v,
                             const ReconstructionParams& params = {});

}  // namespace sketchdist
