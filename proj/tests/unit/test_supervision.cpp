#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sketchdist/sparsity.hpp"
#include "sketchdist/supervision.hpp"

using namespace sketchdist;
namespace st = sketchdist::testing;

namespace {

std::vector<Site> e_sites(const LabelField& gt) {
  std::vector<Site> out;
  for (const auto& e : st::brute_boundary_edges(gt)) out.push_back(Site::edge_midpoint(e));
  return out;
}

std::vector<Site> as_vector(const SiteSet& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(RealizeBoundaries, DisjointStrokesHaveNoB) {
  AnnotationSet ann(8, 8);
  ann.s0(0, 0) = 1;
  ann.s1(5, 5) = 1;
  const auto r = realize_boundaries(ann);
  EXPECT_TRUE(r.b.empty());
  EXPECT_EQ(r.cb.size(), 2u + 4u);
}

TEST(RealizeBoundaries, HalvesTouchAlongInterface) {
  AnnotationSet ann(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) (x < 2 ? ann.s0 : ann.s1)(x, y) = 1;
  }
  const auto r = realize_boundaries(ann);
  ASSERT_EQ(r.b.size(), 4u);
  for (const auto& s : r.b) EXPECT_EQ(s.x2, 3);
  EXPECT_EQ(r.cb, r.b);
}

TEST(RealizeBoundaries, OverlapIsRejected) {
  AnnotationSet ann(3, 3);
  ann.s0(1, 1) = 1;
  ann.s1(1, 1) = 1;
  try {
    realize_boundaries(ann);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverlappingStrokes);
  }
}

TEST(ValidSet, EmptyBGivesEmptyD) {
  AnnotationSet ann(10, 10);
  for (int x = 2; x < 6; ++x) ann.s1(x, 4) = 1;
  EXPECT_EQ(count(valid_set(ann)), 0u);
}

TEST(ValidSet, FullAnnotationCoversDomain) {
  st::Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = st::random_scene(rng, 30, 26);
    const auto ann = derive_annotation(gt, PixelSet(30, 26, 1));
    EXPECT_EQ(count(valid_set(ann)), gt.size());
  }
}

TEST(ValidSet, MatchesDefinitionWithBruteForce) {
  st::Rng rng(32);
  for (int trial = 0; trial < 15; ++trial) {
    const auto gt = st::random_scene(rng, 24, 24);
    const auto ann = derive_annotation(gt, st::random_mask(rng, 24, 24, 0.3));
    const auto r = realize_boundaries(ann);
    const auto b = as_vector(r.b);
    const auto cb = as_vector(r.cb);
    const auto d = valid_set(ann);
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 24; ++x) {
        const bool in_s = ann.s0(x, y) || ann.s1(x, y);
        const auto sb = st::brute_squared(b, x, y);
        const auto scb = st::brute_squared(cb, x, y);
        bool expect = false;
        if (in_s) {
          if (sb < 0) {
            expect = ann.s0(x, y) && scb < 0;
          } else {
            expect = scb < 0 || sb <= scb;
          }
        }
        ASSERT_EQ(d(x, y) != 0, expect) << x << "," << y;
      }
    }
  }
}

TEST(Theorem, IdentityAndInequalityOnRandomScenes) {
  st::Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto gt = st::random_scene(rng, 32, 32);
    const auto ann = derive_annotation(gt, st::random_mask(rng, 32, 32, 0.15 + 0.02 * trial));
    ASSERT_TRUE(validate_annotation(ann, gt).admissible);
    const auto es = e_sites(gt);
    const auto r = realize_boundaries(ann);
    const auto b = as_vector(r.b);
    const auto cb = as_vector(r.cb);
    const auto d = valid_set(ann);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const auto se = st::brute_squared(es, x, y);
        if (d(x, y)) {
          ASSERT_EQ(st::brute_squared(b, x, y), se);
        }
        if ((ann.s0(x, y) || ann.s1(x, y)) && se >= 0) {
          const auto scb = st::brute_squared(cb, x, y);
          ASSERT_GE(scb, 0);
          ASSERT_LE(scb, se);
        }
      }
    }
  }
}

TEST(ValidSet, MonotoneWhenBGrows) {
  st::Rng rng(34);
  for (int trial = 0; trial < 15; ++trial) {
    const auto gt = st::random_scene(rng, 28, 28);
    const auto mask = st::random_mask(rng, 28, 28, 0.3);
    auto ann = derive_annotation(gt, mask);
    const auto before = valid_set(ann);
    // extra E edges stay admissible: B remains inside E
    ann.manual_edges = set_union(ann.manual_edges, boundary_edges(gt));
    ASSERT_TRUE(validate_annotation(ann, gt).admissible);
    const auto after = valid_set(ann);
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i]) {
        ASSERT_TRUE(after[i]);
      }
    }
  }
}

TEST(Validate, DerivedAnnotationsPass) {
  st::Rng rng(35);
  for (int trial = 0; trial < 40; ++trial) {
    const auto gt = st::random_scene(rng, 32, 28);
    const auto ann = derive_annotation(gt, st::random_mask(rng, 32, 28, 0.05 * (trial % 20)));
    EXPECT_TRUE(validate_annotation(ann, gt).admissible);
  }
}

TEST(Validate, StrokeAcrossTwoInstancesNeedsManualBoundary) {
  LabelField gt(8, 3, 0);
  for (int y = 0; y < 3; ++y) {
    for (int x = 1; x < 4; ++x) gt(x, y) = 1;
    for (int x = 4; x < 7; ++x) gt(x, y) = 2;
  }
  AnnotationSet ann(8, 3);
  for (int x = 2; x < 6; ++x) ann.s1(x, 1) = 1;
  const auto rep = validate_annotation(ann, gt);
  EXPECT_FALSE(rep.boundaries_complete.passed);
  EXPECT_FALSE(rep.admissible);
  ASSERT_EQ(rep.boundaries_complete.edges.size(), 1u);
  EXPECT_EQ(rep.boundaries_complete.edges[0], (Edge{{3, 1}, {4, 1}}));

  ann.manual_edges = EdgeSet(std::vector<Edge>{{{3, 1}, {4, 1}}});
  EXPECT_TRUE(validate_annotation(ann, gt).admissible);
}

TEST(Validate, ForegroundStrokeOnBackgroundIsReported) {
  LabelField gt(5, 5, 0);
  gt(2, 2) = 1;
  AnnotationSet ann(5, 5);
  ann.s1(0, 0) = 1;
  const auto rep = validate_annotation(ann, gt);
  EXPECT_FALSE(rep.strokes_in_class.passed);
  ASSERT_EQ(rep.strokes_in_class.pixels.size(), 1u);
  EXPECT_EQ(rep.strokes_in_class.pixels[0], (Pixel{0, 0}));
}

TEST(Validate, ManualPixelWithinHalfDiagonalOfE) {
  LabelField gt(6, 6, 0);
  for (int y = 0; y < 6; ++y) {
    for (int x = 3; x < 6; ++x) gt(x, y) = 1;
  }
  AnnotationSet ann(6, 6);
  ann.manual(2, 3) = 1;  // adjacent to the interface at x = 2.5
  EXPECT_TRUE(validate_annotation(ann, gt).boundaries_on_edges.passed);
  ann.manual(0, 0) = 1;
  const auto rep = validate_annotation(ann, gt);
  EXPECT_FALSE(rep.boundaries_on_edges.passed);
  EXPECT_EQ(rep.boundaries_on_edges.pixels, (std::vector<Pixel>{Pixel{0, 0}}));
}

TEST(Validate, DimensionMismatch) {
  EXPECT_THROW(validate_annotation(AnnotationSet(3, 3), LabelField(4, 3, 0)), Error);
}

TEST(MakeTargets, StripSplitAtInterface) {
  AnnotationSet ann(7, 1);
  for (int x = 0; x < 7; ++x) ann.s1(x, 0) = 1;
  ann.manual_edges = EdgeSet(std::vector<Edge>{{{2, 0}, {3, 0}}});
  const auto t = make_targets(ann);
  EXPECT_EQ(t.d_star(0, 0), 2.5);
  EXPECT_TRUE(t.flow_valid(0, 0));
  EXPECT_EQ(t.v_star.vx(0, 0), -1.0);
  EXPECT_EQ(t.v_star.vy(0, 0), 0.0);
}

TEST(MakeTargets, BackgroundStrokesGetConstant) {
  st::Rng rng(36);
  const auto gt = st::random_scene(rng, 20, 20);
  const auto ann = derive_annotation(gt, st::random_mask(rng, 20, 20, 0.5));
  const auto t = make_targets(ann, -3.0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!ann.s0[i]) continue;
    EXPECT_EQ(t.d_star[i], -3.0);
    EXPECT_EQ(t.v_star.vx[i], 0.0);
    EXPECT_EQ(t.v_star.vy[i], 0.0);
  }
}

TEST(MakeTargets, Invariants) {
  st::Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = st::random_scene(rng, 30, 30);
    const auto ann = derive_annotation(gt, st::random_mask(rng, 30, 30, 0.4));
    const auto t = make_targets(ann);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (t.valid[i]) {
        ASSERT_TRUE(ann.s0[i] || ann.s1[i]);
      }
      if (t.flow_valid[i]) {
        ASSERT_TRUE(t.valid[i] && ann.s1[i]);
        ASSERT_NEAR(std::hypot(t.v_star.vx[i], t.v_star.vy[i]), 1.0, 1e-15);
      }
      if (t.valid[i] && ann.s1[i]) {
        ASSERT_GE(t.d_star[i], 0.0);
      }
      ASSERT_TRUE(std::isfinite(t.d_star[i]) && std::isfinite(t.lower_bound[i]));
    }
  }
}

TEST(MakeTargetsFull, AllBackground) {
  const auto f = make_targets_full(LabelField(9, 7, 0));
  for (auto d : f.targets.d_star.values()) EXPECT_EQ(d, -1.0);
  EXPECT_EQ(count(f.targets.valid), 63u);
}

TEST(MakeTargetsFull, CenteredDiskPeak) {
  const int n = 41;
  const double r = 12.0;
  LabelField gt(n, n, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) gt(x, y) = std::hypot(x - 20.0, y - 20.0) <= r ? 1 : 0;
  }
  const auto f = make_targets_full(gt);
  double peak = 0.0;
  for (auto d : f.targets.d_star.values()) peak = std::max(peak, d);
  EXPECT_NEAR(peak, r, 0.5);
}

TEST(MakeTargetsFull, BoundaryTargetIsSymmetric) {
  LabelField gt(4, 1, std::vector<std::int32_t>{0, 1, 1, 2});
  const auto f = make_targets_full(gt);
  EXPECT_EQ(f.b_star.values()[0], 1.0);
  EXPECT_EQ(f.b_star.values()[1], 1.0);
  EXPECT_EQ(f.b_star.values()[2], 1.0);
  EXPECT_EQ(f.b_star.values()[3], 1.0);
  LabelField gt2(4, 1, std::vector<std::int32_t>{0, 0, 1, 1});
  const auto f2 = make_targets_full(gt2);
  EXPECT_EQ(f2.b_star, ScalarField(4, 1, std::vector<double>{0, 1, 1, 0}));
}

TEST(MakeTargetsFull, EqualsFullyAnnotatedPipeline) {
  st::Rng rng(38);
  for (int trial = 0; trial < 15; ++trial) {
    const auto gt = st::random_scene(rng, 36, 30);
    const auto full = make_targets_full(gt).targets;
    const auto part = make_targets(derive_annotation(gt, PixelSet(36, 30, 1)));
    EXPECT_EQ(part.d_star, full.d_star);
    EXPECT_EQ(part.v_star, full.v_star);
    EXPECT_EQ(part.valid, full.valid);
    EXPECT_EQ(part.flow_valid, full.flow_valid);
  }
}

TEST(MakeTargets, BorderFlagAddsCompleteBoundarySites) {
  AnnotationSet ann(5, 5);
  std::vector<Edge> split;
  for (int y = 0; y < 5; ++y) {
    ann.s1(0, y) = 1;
    ann.s1(1, y) = 1;
    split.push_back({{1, y}, {2, y}});
  }
  ann.manual_edges = EdgeSet(split);
  const auto off = make_targets(ann, -1.0, false);
  const auto on = make_targets(ann, -1.0, true);
  EXPECT_TRUE(off.valid(0, 2));
  EXPECT_EQ(off.d_star(0, 2), 1.5);
  EXPECT_EQ(off.lower_bound(0, 2), 1.5);
  EXPECT_FALSE(on.valid(0, 2));  // the border side at x = -0.5 is nearer than B
  EXPECT_EQ(on.lower_bound(0, 2), 0.5);
}
