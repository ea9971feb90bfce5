#include "sketchdist/edt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sketchdist {

SiteSet::SiteSet(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool SiteSet::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

SiteSet set_union(const SiteSet& l, const SiteSet& r) {
  SiteSet out;
  out.sites_.reserve(l.size() + r.size());
  std::set_union(l.sites_.begin(), l.sites_.end(), r.sites_.begin(), r.sites_.end(),
                 std::back_inserter(out.sites_));
  return out;
}

SiteSet edges_to_sites(const EdgeSet& edges) {
  std::vector<Site> sites;
  sites.reserve(edges.size());
  for (const auto& e : edges) sites.push_back(Site::edge_midpoint(e));
  return SiteSet(std::move(sites));
}

SiteSet pixels_to_sites(const PixelSet& mask) {
  std::vector<Site> sites;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y)) sites.push_back(Site::pixel_center({x, y}));
    }
  }
  return SiteSet(std::move(sites));
}

namespace {

// Breakpoint between two parabolas, kept as an exact fraction (den > 0).
struct Breakpoint {
  std::int64_t num = 0;
  std::int64_t den = 1;
  int inf = 0;  // -1 = -inf, +1 = +inf
};

bool operator<=(const Breakpoint& a, const Breakpoint& b) {
  if (a.inf != 0 || b.inf != 0) {
    if (a.inf == b.inf) return true;
    return a.inf < b.inf;
  }
  return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
}

// a < x for integer x
bool less_than(const Breakpoint& a, std::int64_t x) {
  if (a.inf != 0) return a.inf < 0;
  return a.num < static_cast<__int128>(x) * a.den;
}

}  // namespace

DistanceResult distance_to_sites(const SiteSet& sites, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "distance transform needs a non-empty domain");
  }
  for (const auto& s : sites) {
    if (s.x2 < -1 || s.y2 < -1 || s.x2 > 2 * width - 1 || s.y2 > 2 * height - 1) {
      throw Error(ErrorCode::kSiteOutOfDomain,
                  "site (" + std::to_string(s.x()) + ", " + std::to_string(s.y()) +
                      ") outside the domain");
    }
  }

  DistanceResult result{ScalarField(width, height, std::numeric_limits<double>::infinity()),
                        Grid<SquaredDistance>(width, height, kInfiniteSquaredDistance),
                        Grid<Site>(width, height, Site{})};
  if (sites.empty()) return result;

  // Bucket sites by doubled column (offset by one so x2 = -1 maps to slot 0).
  // Sites arrive sorted by (y2, x2), so each bucket is sorted by y2.
  const int columns = 2 * width + 1;
  std::vector<std::vector<std::int32_t>> column_sites(static_cast<std::size_t>(columns));
  for (const auto& s : sites) column_sites[static_cast<std::size_t>(s.x2 + 1)].push_back(s.y2);

  std::vector<std::int32_t> active;  // doubled x of non-empty columns, increasing
  for (int c = 0; c < columns; ++c) {
    if (!column_sites[static_cast<std::size_t>(c)].empty()) active.push_back(c - 1);
  }
  const std::size_t n_active = active.size();

  // Pass 1: per active column, squared vertical distance to the nearest site
  // in that column at every pixel row.
  std::vector<std::int64_t> column_sq(n_active * static_cast<std::size_t>(height));
  std::vector<std::int32_t> column_y(n_active * static_cast<std::size_t>(height));
  for (std::size_t a = 0; a < n_active; ++a) {
    const auto& ys = column_sites[static_cast<std::size_t>(active[a] + 1)];
    std::size_t j = 0;
    for (int row = 0; row < height; ++row) {
      const std::int64_t q = 2 * row;
      while (j + 1 < ys.size() && std::abs(ys[j + 1] - q) < std::abs(ys[j] - q)) ++j;
      const std::int64_t dy = q - ys[j];
      column_sq[static_cast<std::size_t>(row) * n_active + a] = dy * dy;
      column_y[static_cast<std::size_t>(row) * n_active + a] = ys[j];
    }
  }

  // Pass 2: lower envelope of the parabolas (x - c)^2 + f_c along each row.
  std::vector<std::size_t> hull(n_active);
  std::vector<Breakpoint> starts(n_active + 1);
  for (int row = 0; row < height; ++row) {
    const std::int64_t* f = &column_sq[static_cast<std::size_t>(row) * n_active];
    auto key = [&](std::size_t a) {
      const std::int64_t c = active[a];
      return f[a] + c * c;
    };
    auto intersect = [&](std::size_t later, std::size_t earlier) {
      return Breakpoint{key(later) - key(earlier),
                        2 * (static_cast<std::int64_t>(active[later]) - active[earlier]), 0};
    };

    std::size_t k = 0;
    hull[0] = 0;
    starts[0] = Breakpoint{0, 1, -1};
    starts[1] = Breakpoint{0, 1, +1};
    for (std::size_t a = 1; a < n_active; ++a) {
      Breakpoint s = intersect(a, hull[k]);
      while (s <= starts[k]) {
        --k;
        s = intersect(a, hull[k]);
      }
      ++k;
      hull[k] = a;
      starts[k] = s;
      starts[k + 1] = Breakpoint{0, 1, +1};
    }

    k = 0;
    for (int col = 0; col < width; ++col) {
      const std::int64_t q = 2 * col;
      while (less_than(starts[k + 1], q)) ++k;
      const std::size_t a = hull[k];
      const std::int64_t dx = q - active[a];
      const SquaredDistance sq = dx * dx + f[a];
      result.squared(col, row) = sq;
      result.dist(col, row) = 0.5 * std::sqrt(static_cast<double>(sq));
      result.nearest(col, row) =
          Site{active[a], column_y[static_cast<std::size_t>(row) * n_active + a]};
    }
  }
  return result;
}

}  // namespace sketchdist
