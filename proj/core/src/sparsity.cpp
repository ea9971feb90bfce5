#include "sketchdist/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchdist/parallel.hpp"
#include "sketchdist/random.hpp"

namespace sketchdist {

namespace {

// Symmetric padding: d c b a | a b c d | d c b a
int reflect(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= total;
  return k;
}

}  // namespace

void SparsityConfig::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must lie in [0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
}

ScalarField smoothed_noise(int width, int height, double sigma, std::uint64_t seed, int jobs) {
  const Philox4x32 rng(seed);
  ScalarField noise(width, height, 0.0);
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = normal_from_block(rng.block(i));

  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);

  ScalarField rows(width, height, 0.0);
  parallel_for(static_cast<std::size_t>(height), jobs, [&](std::size_t begin, std::size_t end) {
    for (int y = static_cast<int>(begin); y < static_cast<int>(end); ++y) {
      for (int x = 0; x < width; ++x) {
        double s = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          s += kernel[static_cast<std::size_t>(k + radius)] * noise(reflect(x + k, width), y);
        }
        rows(x, y) = s;
      }
    }
  });
  ScalarField out(width, height, 0.0);
  parallel_for(static_cast<std::size_t>(height), jobs, [&](std::size_t begin, std::size_t end) {
    for (int y = static_cast<int>(begin); y < static_cast<int>(end); ++y) {
      for (int x = 0; x < width; ++x) {
        double s = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          s += kernel[static_cast<std::size_t>(k + radius)] * rows(x, reflect(y + k, height));
        }
        out(x, y) = s;
      }
    }
  });
  return out;
}

PixelSet gaussian_mask(int width, int height, const SparsityConfig& config, int jobs) {
  config.validate();
  PixelSet mask(width, height, 0);
  const std::size_t n = mask.size();
  const auto keep = static_cast<std::size_t>(std::llround(config.fraction * static_cast<double>(n)));
  if (keep == 0) return mask;
  if (keep >= n) {
    std::fill(mask.values().begin(), mask.values().end(), std::uint8_t{1});
    return mask;
  }
  const auto field = smoothed_noise(width, height, config.sigma, config.seed, jobs);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (field[a] != field[b]) return field[a] > field[b];
                     return a < b;
                   });
  for (std::size_t i = 0; i < keep; ++i) mask[order[i]] = 1;
  return mask;
}

AnnotationSet derive_annotation(const LabelField& gt, const PixelSet& mask) {
  require_same_shape(gt, mask, "derive_annotation");
  AnnotationSet ann(gt.width(), gt.height());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    if (gt[i] == 0) {
      ann.s0[i] = 1;
    } else {
      ann.s1[i] = 1;
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : boundary_edges(gt)) {
    if (mask[e.a] || mask[e.b]) edges.push_back(e);
  }
  ann.manual_edges = EdgeSet(std::move(edges));
  return ann;
}

Rect patch_rect(Pixel center, int patch_size, int width, int height) {
  const int half = patch_size / 2;
  const int x = std::clamp(center.x - half, 0, std::max(width - patch_size, 0));
  const int y = std::clamp(center.y - half, 0, std::max(height - patch_size, 0));
  return {x, y, std::min(patch_size, width), std::min(patch_size, height)};
}

std::vector<Pixel> sample_patch_centers(const AnnotationSet& ann, int count, int patch_size,
                                        std::uint64_t seed) {
  if (patch_size <= 0 || patch_size > std::min(ann.width(), ann.height())) {
    throw Error(ErrorCode::kInvalidArgument, "patch_size must lie in [1, min(width, height)]");
  }
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be non-negative");
  std::vector<Pixel> annotated;
  for (int y = 0; y < ann.height(); ++y) {
    for (int x = 0; x < ann.width(); ++x) {
      if (ann.s0(x, y) || ann.s1(x, y)) annotated.push_back({x, y});
    }
  }
  if (annotated.empty()) throw Error(ErrorCode::kEmptyAnnotation, "annotation has no stroke pixels");

  const Philox4x32 rng(seed);
  const int half = patch_size / 2;
  std::vector<Pixel> centers;
  centers.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto b = rng.block(static_cast<std::uint64_t>(i), 1);
    const std::uint64_t draw = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const Pixel p = annotated[bounded(draw, annotated.size())];
    const Rect r = patch_rect(p, patch_size, ann.width(), ann.height());
    centers.push_back({r.x + half, r.y + half});
  }
  return centers;
}

AnnotationSet crop_annotation(const AnnotationSet& ann, const Rect& rect) {
  if (rect.width <= 0 || rect.height <= 0 || rect.x < 0 || rect.y < 0 ||
      rect.x + rect.width > ann.width() || rect.y + rect.height > ann.height()) {
    throw Error(ErrorCode::kOutOfBounds, "crop rectangle outside the domain");
  }
  AnnotationSet out(rect.width, rect.height);
  for (int y = 0; y < rect.height; ++y) {
    for (int x = 0; x < rect.width; ++x) {
      out.s0(x, y) = ann.s0(rect.x + x, rect.y + y);
      out.s1(x, y) = ann.s1(rect.x + x, rect.y + y);
      out.manual(x, y) = ann.manual(rect.x + x, rect.y + y);
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : ann.manual_edges) {
    if (!rect.contains(e.a) || !rect.contains(e.b)) continue;
    edges.push_back({{e.a.x - rect.x, e.a.y - rect.y}, {e.b.x - rect.x, e.b.y - rect.y}});
  }
  out.manual_edges = EdgeSet(std::move(edges));
  return out;
}

AnnotationSet flip_annotation(const AnnotationSet& ann, FlipAxis axis) {
  const int w = ann.width();
  const int h = ann.height();
  auto map = [&](Pixel p) {
    return axis == FlipAxis::kHorizontal ? Pixel{w - 1 - p.x, p.y} : Pixel{p.x, h - 1 - p.y};
  };
  AnnotationSet out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Pixel q = map({x, y});
      out.s0[q] = ann.s0(x, y);
      out.s1[q] = ann.s1(x, y);
      out.manual[q] = ann.manual(x, y);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(ann.manual_edges.size());
  for (const auto& e : ann.manual_edges) edges.push_back({map(e.a), map(e.b)});
  out.manual_edges = EdgeSet(std::move(edges));
  return out;
}

}  // namespace sketchdist
