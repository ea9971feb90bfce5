#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sketchdist/metrics.hpp"

using namespace sketchdist;
namespace st = sketchdist::testing;

namespace {

LabelField permute(const LabelField& l, std::uint64_t seed) {
  const auto n = static_cast<std::int32_t>(instance_count(l));
  std::vector<std::int32_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 1);
  std::shuffle(ids.begin(), ids.end(), st::Rng(seed));
  LabelField out = l;
  for (auto& v : out.values()) {
    if (v > 0) v = ids[static_cast<std::size_t>(v - 1)] * 3;
  }
  return out;
}

}  // namespace

TEST(Match, Identity) {
  st::Rng rng(81);
  const auto gt = st::random_scene(rng, 40, 40);
  const auto m = match_instances(gt, gt, 0.5);
  EXPECT_EQ(m.tp, static_cast<std::int64_t>(instance_count(gt)));
  EXPECT_EQ(m.fp, 0);
  EXPECT_EQ(m.fn, 0);
  for (const auto& p : m.pairs) EXPECT_EQ(p.iou, 1.0);
}

TEST(Match, EmptyPrediction) {
  st::Rng rng(82);
  const auto gt = st::random_scene(rng, 40, 40);
  const auto m = match_instances(LabelField(40, 40, 0), gt, 0.5);
  EXPECT_EQ(m.tp, 0);
  EXPECT_EQ(m.fn, static_cast<std::int64_t>(instance_count(gt)));
}

TEST(Match, GreedyEqualsOptimalAtHalf) {
  st::Rng rng(83);
  for (int trial = 0; trial < 40; ++trial) {
    const auto gt = st::random_scene(rng, 48, 48);
    const auto pred = st::perturbed_prediction(rng, gt);
    const auto m = match_instances(pred, gt, 0.5);
    std::vector<std::pair<std::int32_t, std::int32_t>> got;
    for (const auto& p : m.pairs) got.emplace_back(p.gt_id, p.pred_id);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, st::optimal_assignment(pred, gt, 0.5));
  }
}

TEST(Match, CountsAndBounds) {
  st::Rng rng(84);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = st::random_scene(rng, 32, 32);
    const auto pred = st::perturbed_prediction(rng, gt);
    const auto r = evaluate(pred, gt, 0.5);
    EXPECT_EQ(r.match.tp + r.match.fn, static_cast<std::int64_t>(instance_count(gt)));
    EXPECT_EQ(r.match.tp + r.match.fp, static_cast<std::int64_t>(instance_count(pred)));
    for (const auto& p : r.match.pairs) EXPECT_GT(p.iou, 0.5);
    for (double v : {r.object_accuracy, r.prf.precision, r.prf.recall, r.prf.f1, r.dice_jaccard.dice,
                     r.dice_jaccard.jaccard, r.panoptic.dq, r.panoptic.sq}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Match, RelabelingInvariance) {
  st::Rng rng(85);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gt = st::random_scene(rng, 32, 32);
    const auto pred = st::perturbed_prediction(rng, gt);
    const auto a = evaluate(pred, gt, 0.5);
    const auto b = evaluate(permute(pred, trial), permute(gt, trial + 100), 0.5);
    EXPECT_EQ(a.match.tp, b.match.tp);
    EXPECT_EQ(a.object_accuracy, b.object_accuracy);
    EXPECT_EQ(a.prf.f1, b.prf.f1);
    EXPECT_NEAR(a.dice_jaccard.dice, b.dice_jaccard.dice, 1e-15);
    EXPECT_NEAR(a.dice_jaccard.jaccard, b.dice_jaccard.jaccard, 1e-15);
    EXPECT_NEAR(a.panoptic.sq, b.panoptic.sq, 1e-15);
  }
}

TEST(Match, RejectsBadTau) {
  EXPECT_THROW(match_instances(LabelField(2, 2, 0), LabelField(2, 2, 0), 1.0), Error);
  EXPECT_THROW(match_instances(LabelField(2, 2, 0), LabelField(3, 2, 0), 0.5), Error);
}

TEST(Formulas, ObjectAccuracy) {
  MatchResult a;
  a.tp = 5;
  a.fp = 1;
  a.fn = 2;
  EXPECT_EQ(object_accuracy(std::span<const MatchResult>(&a, 1)), 0.625);
  MatchResult perfect, half;
  perfect.tp = 3;
  half.tp = 1;
  half.fp = 1;
  const std::vector<MatchResult> two{perfect, half};
  EXPECT_EQ(object_accuracy(two), 0.75);
  EXPECT_EQ(object_accuracy(std::vector<MatchResult>{MatchResult{}}), 1.0);
  EXPECT_THROW(object_accuracy(std::vector<MatchResult>{}), Error);
}

TEST(Formulas, PrecisionRecallF1) {
  const auto p = precision_recall_f1(3, 1, 3);
  EXPECT_EQ(p.precision, 0.75);
  EXPECT_EQ(p.recall, 0.5);
  EXPECT_DOUBLE_EQ(p.f1, 0.6);
  const auto z = precision_recall_f1(0, 4, 0);
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  const auto e = precision_recall_f1(0, 0, 0);
  EXPECT_EQ(e.f1, 1.0);
}

TEST(Formulas, DiceJaccardIdentity) {
  // one pair with IoU 0.6 and equal sizes
  LabelField gt(10, 1, std::vector<std::int32_t>{1, 1, 1, 1, 0, 0, 0, 0, 0, 0});
  LabelField pr(10, 1, std::vector<std::int32_t>{0, 1, 1, 1, 1, 0, 0, 0, 0, 0});
  const auto r = evaluate(pr, gt, 0.5);
  EXPECT_DOUBLE_EQ(r.dice_jaccard.jaccard, 0.6);
  EXPECT_DOUBLE_EQ(r.dice_jaccard.dice, 0.75);
}

TEST(Formulas, PanopticExample) {
  MatchResult m;
  m.tp = 2;
  m.fp = 2;
  m.pairs = {{1, 1, 0.6, 0, 0, 0}, {2, 2, 0.8, 0, 0, 0}};
  const auto q = panoptic_dq_sq(m);
  EXPECT_DOUBLE_EQ(q.dq, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(q.sq, 0.7);
}

TEST(Formulas, GoldenFixtures) {
  for (const auto& f : st::metric_fixtures()) {
    SCOPED_TRACE(f.name);
    const auto r = evaluate(f.pred, f.gt, 0.5);
    EXPECT_EQ(r.match.tp, f.tp);
    EXPECT_EQ(r.match.fp, f.fp);
    EXPECT_EQ(r.match.fn, f.fn);
    EXPECT_NEAR(r.object_accuracy, f.oa, 1e-15);
    EXPECT_NEAR(r.prf.precision, f.precision, 1e-15);
    EXPECT_NEAR(r.prf.recall, f.recall, 1e-15);
    EXPECT_NEAR(r.prf.f1, f.f1, 1e-15);
    EXPECT_NEAR(r.dice_jaccard.dice, f.dice, 1e-15);
    EXPECT_NEAR(r.dice_jaccard.jaccard, f.jaccard, 1e-15);
    EXPECT_NEAR(r.panoptic.dq, f.dq, 1e-15);
    EXPECT_NEAR(r.panoptic.sq, f.sq, 1e-15);
  }
}

TEST(Curve, IdentityIsFlat) {
  st::Rng rng(86);
  std::vector<LabelField> gts;
  for (int i = 0; i < 4; ++i) gts.push_back(st::random_scene(rng, 30, 30));
  const std::vector<double> taus{0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  for (const auto& p : f1_curve(gts, gts, taus)) EXPECT_EQ(p.f1, 1.0);
}

TEST(Curve, MonotoneAndMatchesPerPointOracle) {
  st::Rng rng(87);
  std::vector<LabelField> gts, preds;
  for (int i = 0; i < 8; ++i) {
    gts.push_back(st::random_scene(rng, 40, 40));
    preds.push_back(st::perturbed_prediction(rng, gts.back()));
  }
  std::vector<double> taus;
  for (int k = 1; k < 20; ++k) taus.push_back(0.05 * k);
  const auto curve = f1_curve(preds, gts, taus, 3);
  for (std::size_t t = 0; t < taus.size(); ++t) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto m = match_instances(preds[i], gts[i], taus[t]);
      tp += m.tp;
      fp += m.fp;
      fn += m.fn;
    }
    EXPECT_EQ(curve[t].tp, tp);
    EXPECT_EQ(curve[t].f1, precision_recall_f1(tp, fp, fn).f1);
    if (t > 0) {
      EXPECT_LE(curve[t].f1, curve[t - 1].f1);
    }
  }
  EXPECT_EQ(f1_curve(preds, gts, taus, 1).back().f1, curve.back().f1);
}

TEST(Curve, AboveEveryIouIsZero) {
  LabelField gt(4, 1, std::vector<std::int32_t>{1, 1, 1, 0});
  LabelField pr(4, 1, std::vector<std::int32_t>{1, 1, 0, 0});
  const std::vector<LabelField> g{gt}, p{pr};
  const std::vector<double> taus{0.7};
  EXPECT_EQ(f1_curve(p, g, taus)[0].f1, 0.0);
  const std::vector<LabelField> none;
  EXPECT_THROW(f1_curve(p, none, taus), Error);
}
