#pragma once

#include <cstdint>
#include <vector>

#include "sketchdist/raster.hpp"
#include "sketchdist/supervision.hpp"

namespace sketchdist {

struct SparsityConfig {
  double fraction = 0.25;  // share of all pixels kept
  double sigma = 50.0;     // smoothing std-dev in pixels
  std::uint64_t seed = 0;

  void validate() const;
};

/// Smoothed white-noise field: i.i.d. N(0,1) draws from Philox4x32-10 keyed by
/// `seed` (pixel raster index as counter), convolved with a separable Gaussian
/// truncated at 4 sigma with symmetric (reflect) padding.
ScalarField smoothed_noise(int width, int height, double sigma, std::uint64_t seed, int jobs = 1);

/// Keeps exactly round(fraction * N) pixels: the largest smoothed values,
/// ties broken by raster index. Deterministic for fixed (dims, config);
/// `jobs` only splits the convolution work.
PixelSet gaussian_mask(int width, int height, const SparsityConfig& config, int jobs = 1);

/// Derives an admissible annotation from a full labeling: S0 = X0 n mask,
/// S1 = X1 n mask, and every label-change edge with an endpoint in the mask
/// becomes a manual boundary edge.
AnnotationSet derive_annotation(const LabelField& gt, const PixelSet& mask);

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(Pixel p) const noexcept {
    return p.x >= x && p.y >= y && p.x < x + width && p.y < y + height;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Patch of side patch_size around `center`, shifted to fit the domain.
Rect patch_rect(Pixel center, int patch_size, int width, int height);

/// Uniform draws with replacement over annotated pixels (S0 u S1), each
/// clamped so its patch fits the domain. Returned centers are patch centers.
std::vector<Pixel> sample_patch_centers(const AnnotationSet& ann, int count, int patch_size,
                                        std::uint64_t seed);

enum class FlipAxis { kHorizontal, kVertical };  // mirror x / mirror y

/// Crops strokes and boundaries; targets must be recomputed afterwards.
AnnotationSet crop_annotation(const AnnotationSet& ann, const Rect& rect);
AnnotationSet flip_annotation(const AnnotationSet& ann, FlipAxis axis);

}  // namespace sketchdist
