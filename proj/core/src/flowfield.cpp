#include "sketchdist/flowfield.hpp"

#include <algorithm>
#include <cmath>

namespace sketchdist {

VectorField flow_from_distance(const ScalarField& d, const PixelSet& fg) {
  require_same_shape(d, fg, "flow_from_distance");
  const int w = d.width();
  const int h = d.height();
  VectorField v(w, h);
  auto in_fg = [&](int x, int y) { return fg.contains(x, y) && fg(x, y) != 0; };
  auto derivative = [&](int x, int y, int dx, int dy) {
    const bool fwd = in_fg(x + dx, y + dy);
    const bool bwd = in_fg(x - dx, y - dy);
    if (fwd && bwd) return 0.5 * (d(x + dx, y + dy) - d(x - dx, y - dy));
    if (fwd) return d(x + dx, y + dy) - d(x, y);
    if (bwd) return d(x, y) - d(x - dx, y - dy);
    return 0.0;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fg(x, y)) continue;
      const double gx = derivative(x, y, 1, 0);
      const double gy = derivative(x, y, 0, 1);
      const double n = std::hypot(gx, gy);
      if (n <= kFlowEpsilon) continue;
      v.vx(x, y) = gx / n;
      v.vy(x, y) = gy / n;
    }
  }
  return v;
}

Point sample_bilinear(const VectorField& v, Point p) {
  const int x0 = static_cast<int>(std::floor(p.x));
  const int y0 = static_cast<int>(std::floor(p.y));
  const double fx = p.x - x0;
  const double fy = p.y - y0;
  Point out;
  auto add = [&](int x, int y, double weight) {
    if (weight == 0.0 || !v.vx.contains(x, y)) return;
    out.x += weight * v.vx(x, y);
    out.y += weight * v.vy(x, y);
  };
  add(x0, y0, (1.0 - fx) * (1.0 - fy));
  add(x0 + 1, y0, fx * (1.0 - fy));
  add(x0, y0 + 1, (1.0 - fx) * fy);
  add(x0 + 1, y0 + 1, fx * fy);
  return out;
}

Point euler_step(const VectorField& v, Point p, double dt) {
  const Point f = sample_bilinear(v, p);
  const double max_x = static_cast<double>(std::max(v.width() - 1, 0));
  const double max_y = static_cast<double>(std::max(v.height() - 1, 0));
  return {std::clamp(p.x + dt * f.x, 0.0, max_x), std::clamp(p.y + dt * f.y, 0.0, max_y)};
}

std::vector<Trajectory> euler_integrate(const VectorField& v, std::span<const Point> starts,
                                        double dt, int steps) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (steps < 0) throw Error(ErrorCode::kInvalidArgument, "steps must be non-negative");
  std::vector<Trajectory> out;
  out.reserve(starts.size());
  for (const auto& start : starts) {
    Trajectory t{start, {}, dt, steps};
    t.positions.reserve(static_cast<std::size_t>(steps) + 1);
    t.positions.push_back(start);
    Point p = start;
    for (int l = 0; l < steps; ++l) {
      p = euler_step(v, p, dt);
      t.positions.push_back(p);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Point> pixel_centers(int width, int height) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  return out;
}

std::pair<std::vector<Trajectory>, std::vector<Trajectory>> euler_loss_trajectories(
    const VectorField& v, const VectorField& v_star, std::span<const Point> starts, double dt,
    int steps) {
  require_same_shape(v.vx, v_star.vx, "euler_loss_trajectories");
  return {euler_integrate(v, starts, dt, steps), euler_integrate(v_star, starts, dt, steps)};
}

void ReconstructionParams::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 1");
  if (cluster_radius < 0) throw Error(ErrorCode::kInvalidArgument, "cluster_radius must be >= 0");
  if (min_size < 0) throw Error(ErrorCode::kInvalidArgument, "min_size must be >= 0");
}

LabelField reconstruct_masks(const ScalarField& d, const VectorField& v,
                             const ReconstructionParams& params) {
  params.validate();
  require_same_shape(d, v.vx, "reconstruct_masks");
  const int w = d.width();
  const int h = d.height();

  // Converged bin of every foreground pixel.
  std::vector<std::size_t> fg_index;
  std::vector<Pixel> bins;
  PixelSet occupancy(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!(d(x, y) > params.fg_threshold)) continue;
      Point p{static_cast<double>(x), static_cast<double>(y)};
      for (int l = 0; l < params.steps; ++l) p = euler_step(v, p, params.dt);
      const Pixel bin{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
      fg_index.push_back(d.index(x, y));
      bins.push_back(bin);
      occupancy[bin] = 1;
    }
  }
  LabelField labels(w, h, 0);
  if (fg_index.empty()) return labels;

  // Chessboard dilation, separable into a row pass and a column pass.
  const int r = params.cluster_radius;
  PixelSet rows(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!occupancy(x, y)) continue;
      for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) rows(xx, y) = 1;
    }
  }
  PixelSet dilated(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rows(x, y)) continue;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) dilated(x, yy) = 1;
    }
  }
  const LabelField clusters = connected_components(dilated);

  for (std::size_t i = 0; i < fg_index.size(); ++i) labels[fg_index[i]] = clusters[bins[i]];

  std::vector<std::size_t> sizes;
  for (auto l : labels.values()) {
    if (l <= 0) continue;
    if (sizes.size() <= static_cast<std::size_t>(l)) sizes.resize(static_cast<std::size_t>(l) + 1, 0);
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (auto& l : labels.values()) {
    if (l > 0 && sizes[static_cast<std::size_t>(l)] < static_cast<std::size_t>(params.min_size)) l = 0;
  }
  return compact_labels(labels);
}

}  // namespace sketchdist
