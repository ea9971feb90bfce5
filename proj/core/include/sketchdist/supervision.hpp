#pragma once

#include <vector>

#include "sketchdist/edt.hpp"
#include "sketchdist/raster.hpp"

namespace sketchdist {

/// Partial annotation drawn over an image.
///
/// Manual boundaries come in two forms: pixel-drawn ridges (`manual`, the
/// stroke raster's code 3) whose centers become boundary sites, and explicit
/// inter-pixel interfaces (`manual_edges`) as produced when annotations are
/// derived from a full labeling. Manual-boundary pixels are not part of S.
struct AnnotationSet {
  PixelSet s0;      // background strokes
  PixelSet s1;      // foreground strokes
  PixelSet manual;  // manual boundary pixels
  EdgeSet manual_edges;

  AnnotationSet() = default;
  AnnotationSet(int width, int height)
      : s0(width, height, 0), s1(width, height, 0), manual(width, height, 0) {}

  int width() const noexcept { return s0.width(); }
  int height() const noexcept { return s0.height(); }

  /// S = S0 u S1.
  PixelSet strokes() const { return mask_union(s0, s1); }

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Throws when shapes disagree, strokes overlap, manual pixels overlap strokes
/// or a manual edge leaves the domain.
void check_annotation_form(const AnnotationSet& ann);

struct BoundaryRealization {
  EdgeSet touching;  // S0/S1 interfaces
  SiteSet b;         // touching midpoints, manual edge midpoints, manual pixel centers
  SiteSet cb;        // boundaries of S0 and S1, plus b
};

BoundaryRealization realize_boundaries(const AnnotationSet& ann, bool border_is_boundary = false);

/// Stroke pixels whose distance to the user boundaries does not exceed their
/// distance to the complete annotation boundary (ties included). Foreground
/// pixels with no boundary site at all are excluded since their target
/// distance would be infinite.
PixelSet valid_set(const AnnotationSet& ann, bool border_is_boundary = false);

struct CheckResult {
  bool passed = true;
  std::vector<Pixel> pixels;
  std::vector<Edge> edges;
};

struct ValidationReport {
  CheckResult strokes_in_class;      // S0 in X0, S1 in X1
  CheckResult strokes_disjoint;      // S0 and S1 do not overlap
  CheckResult boundaries_on_edges;   // B lies on E
  CheckResult boundaries_complete;   // E edges touching S are in B
  bool admissible = true;
};

ValidationReport validate_annotation(const AnnotationSet& ann, const LabelField& gt);

inline constexpr double kDefaultBackgroundValue = -1.0;

struct SupervisionTargets {
  ScalarField d_star;       // dist(., B) on valid n S1, bg_value on S0, 0 elsewhere
  VectorField v_star;       // unit flow on flow_valid, zero elsewhere
  PixelSet valid;           // D
  PixelSet flow_valid;      // subset of valid n S1 where v* is certified
  ScalarField lower_bound;  // dist(., CB) on S1, 0 elsewhere
  PixelSet s0;
  PixelSet s1;
  double bg_value = kDefaultBackgroundValue;

  int width() const noexcept { return d_star.width(); }
  int height() const noexcept { return d_star.height(); }
};

SupervisionTargets make_targets(const AnnotationSet& ann, double bg_value = kDefaultBackgroundValue,
                                bool border_is_boundary = false);

struct FullTargets {
  SupervisionTargets targets;
  ScalarField b_star;  // 1 on pixels incident to a label-change edge
};

/// Gold standard for a complete labeling: S0 = X0, S1 = X1, B = E.
FullTargets make_targets_full(const LabelField& gt, double bg_value = kDefaultBackgroundValue);

}  // namespace sketchdist
