#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchdist/error.hpp"

namespace sketchdist {

/// Integer pixel coordinate; pixel centers sit at (x, y) = (column, row).
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Dense row-major raster. Dimensions are fixed at construction.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative raster dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), data_(std::move(values)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorCode::kDimensionMismatch, "value count does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool contains(Pixel p) const noexcept { return contains(p.x, p.y); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator[](Pixel p) { return data_[index(p.x, p.y)]; }
  const T& operator[](Pixel p) const { return data_[index(p.x, p.y)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarField = Grid<double>;
/// 0 = background, k >= 1 = instance id.
using LabelField = Grid<std::int32_t>;
/// Membership raster: nonzero = member.
using PixelSet = Grid<std::uint8_t>;

struct VectorField {
  Grid<double> vx;
  Grid<double> vy;

  VectorField() = default;
  VectorField(int width, int height) : vx(width, height, 0.0), vy(width, height, 0.0) {}
  VectorField(Grid<double> x, Grid<double> y);

  int width() const noexcept { return vx.width(); }
  int height() const noexcept { return vx.height(); }
  std::size_t size() const noexcept { return vx.size(); }

  friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Interface between two 4-adjacent pixels, stored with the smaller pixel
/// first. For border pseudo-edges one endpoint lies just outside the domain.
struct Edge {
  Pixel a;
  Pixel b;

  bool horizontal() const noexcept { return a.y == b.y; }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& l, const Edge& r) {
    if (auto c = l.a <=> r.a; c != 0) return c;
    return l.b <=> r.b;
  }
};

/// Builds a canonical edge from two 4-adjacent pixels in either order.
Edge make_edge(Pixel p, Pixel q);

/// Sorted, duplicate-free set of edges.
class EdgeSet {
 public:
  EdgeSet() = default;
  /// Canonicalizes: orients each edge, sorts, removes duplicates. Throws if a
  /// pair is not 4-adjacent.
  explicit EdgeSet(std::vector<Edge> edges);

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(const Edge& e) const;

  auto begin() const noexcept { return edges_.begin(); }
  auto end() const noexcept { return edges_.end(); }

  friend EdgeSet set_union(const EdgeSet& l, const EdgeSet& r);
  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<Edge> edges_;
};

EdgeSet set_union(const EdgeSet& l, const EdgeSet& r);

/// True when both endpoints are inside a width x height domain.
bool edge_in_domain(const Edge& e, int width, int height) noexcept;

std::size_t count(const PixelSet& set) noexcept;
PixelSet mask_union(const PixelSet& l, const PixelSet& r);
PixelSet mask_intersection(const PixelSet& l, const PixelSet& r);
PixelSet mask_of_label(const LabelField& labels, std::int32_t label);
PixelSet foreground(const LabelField& labels);

/// Every edge whose endpoints carry different labels.
EdgeSet boundary_edges(const LabelField& labels);

/// Edges between an in-region pixel and an in-domain out-of-region pixel. With
/// border_is_boundary, image-border sides of region pixels are added as
/// pseudo-edges to the out-of-domain neighbor.
EdgeSet region_boundary(const PixelSet& region, bool border_is_boundary = false);

/// 4-connected components numbered 1..K in first-encounter raster order.
LabelField connected_components(const PixelSet& mask);

/// Renumbers positive labels to 1..K in first-encounter raster order.
LabelField compact_labels(const LabelField& labels);

/// Number of distinct positive labels.
std::size_t instance_count(const LabelField& labels);

void require_same_shape(int w1, int h1, int w2, int h2, const char* what);

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  require_same_shape(a.width(), a.height(), b.width(), b.height(), what);
}

}  // namespace sketchdist
