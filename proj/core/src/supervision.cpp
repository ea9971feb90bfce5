#include "sketchdist/supervision.hpp"

#include <cmath>

namespace sketchdist {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

EdgeSet touching_edges(const PixelSet& s0, const PixelSet& s1) {
  std::vector<Edge> edges;
  for (int y = 0; y < s0.height(); ++y) {
    for (int x = 0; x < s0.width(); ++x) {
      for (int k = 0; k < 2; ++k) {  // right and down neighbours only
        const int nx = x + (k == 0 ? 1 : 0);
        const int ny = y + (k == 1 ? 1 : 0);
        if (!s0.contains(nx, ny)) continue;
        if ((s0(x, y) && s1(nx, ny)) || (s1(x, y) && s0(nx, ny))) {
          edges.push_back({{x, y}, {nx, ny}});
        }
      }
    }
  }
  return EdgeSet(std::move(edges));
}

// Unit vector from the nearest site to the pixel center.
void set_flow(VectorField& v, const DistanceResult& r, int x, int y) {
  const Site n = r.nearest(x, y);
  const double norm = std::sqrt(static_cast<double>(r.squared(x, y)));
  v.vx(x, y) = static_cast<double>(2 * x - n.x2) / norm;
  v.vy(x, y) = static_cast<double>(2 * y - n.y2) / norm;
}

// Pixels of valid n S1 at positive distance whose in-domain 4-neighbours are
// all either valid or outside the strokes.
PixelSet erode_flow_mask(const PixelSet& valid, const PixelSet& s0, const PixelSet& s1,
                         const DistanceResult& to_b) {
  PixelSet out(valid.width(), valid.height(), 0);
  for (int y = 0; y < valid.height(); ++y) {
    for (int x = 0; x < valid.width(); ++x) {
      if (!valid(x, y) || !s1(x, y) || to_b.squared(x, y) <= 0) continue;
      bool ok = true;
      for (int k = 0; k < 4 && ok; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (!valid.contains(nx, ny)) continue;
        const bool in_s = s0(nx, ny) || s1(nx, ny);
        ok = valid(nx, ny) || !in_s;
      }
      out(x, y) = ok ? 1 : 0;
    }
  }
  return out;
}

PixelSet valid_from(const PixelSet& s0, const PixelSet& s1, const DistanceResult& to_b,
                    const DistanceResult& to_cb) {
  PixelSet valid(s0.width(), s0.height(), 0);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!s0[i] && !s1[i]) continue;
    const auto b = to_b.squared[i];
    if (s1[i] && b == kInfiniteSquaredDistance) continue;
    valid[i] = b <= to_cb.squared[i] ? 1 : 0;
  }
  return valid;
}

SupervisionTargets assemble(const PixelSet& s0, const PixelSet& s1, const PixelSet& valid,
                            const DistanceResult& to_b, const DistanceResult& to_cb,
                            double bg_value) {
  const int w = s0.width();
  const int h = s0.height();
  SupervisionTargets t;
  t.d_star = ScalarField(w, h, 0.0);
  t.v_star = VectorField(w, h);
  t.valid = valid;
  t.flow_valid = erode_flow_mask(valid, s0, s1, to_b);
  t.lower_bound = ScalarField(w, h, 0.0);
  t.s0 = s0;
  t.s1 = s1;
  t.bg_value = bg_value;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (s0(x, y)) {
        t.d_star(x, y) = bg_value;
        continue;
      }
      if (!s1(x, y)) continue;
      if (valid(x, y)) t.d_star(x, y) = to_b.dist(x, y);
      // Without any annotation boundary the only certified bound is zero.
      if (to_cb.finite(x, y)) t.lower_bound(x, y) = to_cb.dist(x, y);
      if (t.flow_valid(x, y)) set_flow(t.v_star, to_b, x, y);
    }
  }
  return t;
}

}  // namespace

void check_annotation_form(const AnnotationSet& ann) {
  require_same_shape(ann.s0, ann.s1, "annotation strokes");
  require_same_shape(ann.s0, ann.manual, "annotation manual boundary");
  for (std::size_t i = 0; i < ann.s0.size(); ++i) {
    if (ann.s0[i] && ann.s1[i]) {
      throw Error(ErrorCode::kOverlappingStrokes, "background and foreground strokes overlap");
    }
    if (ann.manual[i] && (ann.s0[i] || ann.s1[i])) {
      throw Error(ErrorCode::kOverlappingStrokes, "manual boundary pixel overlaps a stroke");
    }
  }
  for (const auto& e : ann.manual_edges) {
    if (!edge_in_domain(e, ann.width(), ann.height())) {
      throw Error(ErrorCode::kOutOfBounds, "manual boundary edge outside the domain");
    }
  }
}

BoundaryRealization realize_boundaries(const AnnotationSet& ann, bool border_is_boundary) {
  check_annotation_form(ann);
  BoundaryRealization r;
  r.touching = touching_edges(ann.s0, ann.s1);
  r.b = set_union(set_union(edges_to_sites(r.touching), edges_to_sites(ann.manual_edges)),
                  pixels_to_sites(ann.manual));
  r.cb = set_union(set_union(edges_to_sites(region_boundary(ann.s0, border_is_boundary)),
                             edges_to_sites(region_boundary(ann.s1, border_is_boundary))),
                   r.b);
  return r;
}

PixelSet valid_set(const AnnotationSet& ann, bool border_is_boundary) {
  const auto r = realize_boundaries(ann, border_is_boundary);
  const auto to_b = distance_to_sites(r.b, ann.width(), ann.height());
  const auto to_cb = distance_to_sites(r.cb, ann.width(), ann.height());
  return valid_from(ann.s0, ann.s1, to_b, to_cb);
}

ValidationReport validate_annotation(const AnnotationSet& ann, const LabelField& gt) {
  require_same_shape(ann.s0, gt, "annotation vs labels");
  require_same_shape(ann.s1, gt, "annotation vs labels");
  require_same_shape(ann.manual, gt, "annotation vs labels");
  const int w = gt.width();
  const int h = gt.height();

  ValidationReport report;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool bad_class = (ann.s0(x, y) && gt(x, y) != 0) || (ann.s1(x, y) && gt(x, y) == 0);
      if (bad_class) report.strokes_in_class.pixels.push_back({x, y});
      if (ann.s0(x, y) && ann.s1(x, y)) report.strokes_disjoint.pixels.push_back({x, y});
    }
  }

  const EdgeSet e = boundary_edges(gt);
  const EdgeSet touching = touching_edges(ann.s0, ann.s1);
  for (const auto& edge : set_union(touching, ann.manual_edges)) {
    if (!edge_in_domain(edge, w, h) || !e.contains(edge)) {
      report.boundaries_on_edges.edges.push_back(edge);
    }
  }
  // A drawn pixel sits on E when an E site lies within sqrt(2)/2 of its
  // center, i.e. 4*dist^2 <= 2.
  if (count(ann.manual) > 0) {
    const auto to_e = distance_to_sites(edges_to_sites(e), w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (ann.manual(x, y) && to_e.squared(x, y) > 2) {
          report.boundaries_on_edges.pixels.push_back({x, y});
        }
      }
    }
  }

  for (const auto& edge : e) {
    const bool touches_s = ann.s0[edge.a] || ann.s1[edge.a] || ann.s0[edge.b] || ann.s1[edge.b];
    if (!touches_s) continue;
    const bool covered = touching.contains(edge) || ann.manual_edges.contains(edge) ||
                         ann.manual[edge.a] || ann.manual[edge.b];
    if (!covered) report.boundaries_complete.edges.push_back(edge);
  }

  for (auto* c : {&report.strokes_in_class, &report.strokes_disjoint,
                  &report.boundaries_on_edges, &report.boundaries_complete}) {
    c->passed = c->pixels.empty() && c->edges.empty();
  }
  report.admissible = report.strokes_in_class.passed && report.strokes_disjoint.passed &&
                      report.boundaries_on_edges.passed && report.boundaries_complete.passed;
  return report;
}

SupervisionTargets make_targets(const AnnotationSet& ann, double bg_value,
                                bool border_is_boundary) {
  const auto r = realize_boundaries(ann, border_is_boundary);
  const auto to_b = distance_to_sites(r.b, ann.width(), ann.height());
  const auto to_cb = distance_to_sites(r.cb, ann.width(), ann.height());
  const auto valid = valid_from(ann.s0, ann.s1, to_b, to_cb);
  return assemble(ann.s0, ann.s1, valid, to_b, to_cb, bg_value);
}

FullTargets make_targets_full(const LabelField& gt, double bg_value) {
  const int w = gt.width();
  const int h = gt.height();
  const EdgeSet e = boundary_edges(gt);
  const auto to_e = distance_to_sites(edges_to_sites(e), w, h);

  PixelSet x0(w, h, 0);
  PixelSet x1(w, h, 0);
  PixelSet valid(w, h, 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] < 0) throw Error(ErrorCode::kInvalidArgument, "negative label");
    x0[i] = gt[i] == 0 ? 1 : 0;
    x1[i] = gt[i] > 0 ? 1 : 0;
    valid[i] = (x0[i] || to_e.squared[i] != kInfiniteSquaredDistance) ? 1 : 0;
  }

  FullTargets full;
  // With S = X and B = CB = E every distance query is against E alone.
  full.targets = assemble(x0, x1, valid, to_e, to_e, bg_value);
  full.b_star = ScalarField(w, h, 0.0);
  for (const auto& edge : e) {
    full.b_star[edge.a] = 1.0;
    full.b_star[edge.b] = 1.0;
  }
  return full;
}

}  // namespace sketchdist
