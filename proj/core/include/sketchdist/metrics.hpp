#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketchdist/raster.hpp"

namespace sketchdist {

struct MatchedPair {
  std::int32_t gt_id = 0;
  std::int32_t pred_id = 0;
  double iou = 0.0;
  std::int64_t intersection = 0;
  std::int64_t gt_area = 0;
  std::int64_t pred_area = 0;
};

struct MatchResult {
  double tau = 0.5;
  std::vector<MatchedPair> pairs;  // in acceptance order
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::vector<std::int32_t> unmatched_gt;
  std::vector<std::int32_t> unmatched_pred;
};

/// Greedy one-to-one matching on IoU: candidate pairs are accepted in
/// descending IoU (ties by gt id, then pred id) when IoU > tau strictly.
MatchResult match_instances(const LabelField& pred, const LabelField& gt, double tau = 0.5);

/// Mean over images of TP / (TP + FP + FN); an empty-vs-empty image scores 1.
double object_accuracy(std::span<const MatchResult> results);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give 0, except tp = fp = fn = 0 which gives (1, 1, 1).
PrecisionRecallF1 precision_recall_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn);
PrecisionRecallF1 precision_recall_f1(const MatchResult& result);

struct DiceJaccard {
  double dice = 0.0;
  double jaccard = 0.0;
};

/// Means of per-pair DICE and IoU over the matched pairs, with intersections
/// recounted from the rasters. Both 0 when nothing matched.
DiceJaccard average_dice_and_jaccard(const MatchResult& result, const LabelField& pred,
                                     const LabelField& gt);

struct PanopticQuality {
  double dq = 0.0;
  double sq = 0.0;
};

/// dq = tp / (tp + fp/2 + fn/2), sq = mean matched IoU. Empty-vs-empty gives
/// dq = 1 and sq = 0 (no pairs).
PanopticQuality panoptic_dq_sq(const MatchResult& result);

struct MetricReport {
  MatchResult match;
  double object_accuracy = 0.0;
  PrecisionRecallF1 prf;
  DiceJaccard dice_jaccard;
  PanopticQuality panoptic;
};

MetricReport evaluate(const LabelField& pred, const LabelField& gt, double tau = 0.5);

struct CurvePoint {
  double tau = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double f1 = 0.0;
};

/// Dataset F1 (tp/fp/fn summed over images) per threshold. `taus` must be
/// strictly increasing inside (0, 1). `jobs` parallelizes over images.
std::vector<CurvePoint> f1_curve(std::span<const LabelField> preds, std::span<const LabelField> gts,
                                 std::span<const double> taus, int jobs = 1);

}  // namespace sketchdist
