#include "sketchdist/raster.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>
#include <unordered_map>

namespace sketchdist {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kUnknownDtype: return "unknown_dtype";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kDimensionOverflow: return "dimension_overflow";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kMultiChannel: return "multi_channel";
    case ErrorCode::kUnknownStrokeCode: return "unknown_stroke_code";
    case ErrorCode::kOverlappingStrokes: return "overlapping_strokes";
    case ErrorCode::kSiteOutOfDomain: return "site_out_of_domain";
    case ErrorCode::kEmptyAnnotation: return "empty_annotation";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
  }
  return "unknown";
}

VectorField::VectorField(Grid<double> x, Grid<double> y) : vx(std::move(x)), vy(std::move(y)) {
  require_same_shape(vx, vy, "vector field components");
}

void require_same_shape(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": " + std::to_string(w1) + "x" + std::to_string(h1) +
                    " vs " + std::to_string(w2) + "x" + std::to_string(h2));
  }
}

Edge make_edge(Pixel p, Pixel q) {
  if (std::abs(p.x - q.x) + std::abs(p.y - q.y) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "edge endpoints are not 4-adjacent");
  }
  return p < q ? Edge{p, q} : Edge{q, p};
}

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  for (auto& e : edges_) e = make_edge(e.a, e.b);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool EdgeSet::contains(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

EdgeSet set_union(const EdgeSet& l, const EdgeSet& r) {
  EdgeSet out;
  out.edges_.reserve(l.size() + r.size());
  std::set_union(l.edges_.begin(), l.edges_.end(), r.edges_.begin(), r.edges_.end(),
                 std::back_inserter(out.edges_));
  return out;
}

bool edge_in_domain(const Edge& e, int width, int height) noexcept {
  auto in = [&](Pixel p) { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; };
  return in(e.a) && in(e.b);
}

std::size_t count(const PixelSet& set) noexcept {
  return static_cast<std::size_t>(
      std::count_if(set.values().begin(), set.values().end(), [](std::uint8_t v) { return v != 0; }));
}

PixelSet mask_union(const PixelSet& l, const PixelSet& r) {
  require_same_shape(l, r, "mask_union");
  PixelSet out(l.width(), l.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (l[i] || r[i]) ? 1 : 0;
  return out;
}

PixelSet mask_intersection(const PixelSet& l, const PixelSet& r) {
  require_same_shape(l, r, "mask_intersection");
  PixelSet out(l.width(), l.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (l[i] && r[i]) ? 1 : 0;
  return out;
}

PixelSet mask_of_label(const LabelField& labels, std::int32_t label) {
  PixelSet out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i] == label ? 1 : 0;
  return out;
}

PixelSet foreground(const LabelField& labels) {
  PixelSet out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels[i] > 0 ? 1 : 0;
  return out;
}

EdgeSet boundary_edges(const LabelField& labels) {
  std::vector<Edge> edges;
  const int w = labels.width();
  const int h = labels.height();
  // Raster order with the right neighbour before the lower one is already the
  // canonical order.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto here = labels(x, y);
      if (x + 1 < w && labels(x + 1, y) != here) edges.push_back({{x, y}, {x + 1, y}});
      if (y + 1 < h && labels(x, y + 1) != here) edges.push_back({{x, y}, {x, y + 1}});
    }
  }
  return EdgeSet(std::move(edges));
}

EdgeSet region_boundary(const PixelSet& region, bool border_is_boundary) {
  std::vector<Edge> edges;
  const int w = region.width();
  const int h = region.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region(x, y)) continue;
      constexpr int dx[4] = {1, -1, 0, 0};
      constexpr int dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const Pixel n{x + dx[k], y + dy[k]};
        if (region.contains(n)) {
          if (!region[n]) edges.push_back(make_edge({x, y}, n));
        } else if (border_is_boundary) {
          edges.push_back(make_edge({x, y}, n));
        }
      }
    }
  }
  return EdgeSet(std::move(edges));
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

LabelField connected_components(const PixelSet& mask) {
  const int w = mask.width();
  const int h = mask.height();
  UnionFind uf(mask.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      if (x > 0 && mask(x - 1, y)) uf.unite(mask.index(x, y), mask.index(x - 1, y));
      if (y > 0 && mask(x, y - 1)) uf.unite(mask.index(x, y), mask.index(x, y - 1));
    }
  }
  // Roots are the smallest index of each component, so numbering roots in
  // raster order gives first-encounter numbering.
  LabelField out(w, h, 0);
  std::vector<std::int32_t> root_label(mask.size(), 0);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto r = uf.find(i);
    if (root_label[r] == 0) root_label[r] = ++next;
    out[i] = root_label[r];
  }
  return out;
}

LabelField compact_labels(const LabelField& labels) {
  LabelField out(labels.width(), labels.height(), 0);
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::int32_t next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto l = labels[i];
    if (l < 0) throw Error(ErrorCode::kInvalidArgument, "negative label");
    if (l == 0) continue;
    auto [it, inserted] = remap.try_emplace(l, next + 1);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

std::size_t instance_count(const LabelField& labels) {
  std::vector<std::int32_t> ids;
  for (auto l : labels.values()) {
    if (l > 0) ids.push_back(l);
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

}  // namespace sketchdist
