#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sketchdist/raster.hpp"

namespace sketchdist {

/// A point on the half-integer lattice, stored with doubled coordinates so
/// that pixel centers and inter-pixel edge midpoints are both integral.
struct Site {
  std::int32_t x2 = 0;
  std::int32_t y2 = 0;

  double x() const noexcept { return 0.5 * x2; }
  double y() const noexcept { return 0.5 * y2; }

  static Site pixel_center(Pixel p) noexcept { return {2 * p.x, 2 * p.y}; }
  static Site edge_midpoint(const Edge& e) noexcept {
    return {e.a.x + e.b.x, e.a.y + e.b.y};
  }

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site& a, const Site& b) {
    if (auto c = a.y2 <=> b.y2; c != 0) return c;
    return a.x2 <=> b.x2;
  }
};

/// Sorted, duplicate-free collection of sites.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Site> sites);

  std::span<const Site> sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  bool contains(const Site& s) const;

  auto begin() const noexcept { return sites_.begin(); }
  auto end() const noexcept { return sites_.end(); }

  friend SiteSet set_union(const SiteSet& l, const SiteSet& r);
  friend bool operator==(const SiteSet&, const SiteSet&) = default;

 private:
  std::vector<Site> sites_;
};

SiteSet set_union(const SiteSet& l, const SiteSet& r);

SiteSet edges_to_sites(const EdgeSet& edges);
SiteSet pixels_to_sites(const PixelSet& mask);

/// Squared distance in doubled units, i.e. 4 * (Euclidean distance)^2.
using SquaredDistance = std::int64_t;
inline constexpr SquaredDistance kInfiniteSquaredDistance =
    std::numeric_limits<SquaredDistance>::max();

struct DistanceResult {
  /// Distance in pixels from each pixel center to the nearest site; +inf when
  /// there are no sites.
  ScalarField dist;
  /// Exact 4*dist^2; kInfiniteSquaredDistance when there are no sites.
  Grid<SquaredDistance> squared;
  /// An attaining site per pixel; meaningless when `squared` is infinite.
  Grid<Site> nearest;

  bool finite(int x, int y) const noexcept {
    return squared(x, y) != kInfiniteSquaredDistance;
  }
};

/// Exact Euclidean distance transform to an arbitrary half-integer site set.
/// Sites must lie within [-0.5, width-0.5] x [-0.5, height-0.5].
///
/// The site lattice is supersampled by two so that every site is integral,
/// then a separable lower-envelope-of-parabolas transform runs in exact
/// integer arithmetic. Nearest-site ties resolve to the site found first by
/// the scan (smaller doubled x, then smaller doubled y); the choice is
/// arbitrary but fixed.
DistanceResult distance_to_sites(const SiteSet& sites, int width, int height);

}  // namespace sketchdist
