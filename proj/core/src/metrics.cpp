#include "sketchdist/metrics.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>

#include "sketchdist/losses.hpp"
#include "sketchdist/parallel.hpp"

namespace sketchdist {

namespace {

struct IouTable {
  std::map<std::int32_t, std::int64_t> gt_area;
  std::map<std::int32_t, std::int64_t> pred_area;
  std::vector<MatchedPair> candidates;  // sorted by descending IoU, then ids
};

IouTable build_table(const LabelField& pred, const LabelField& gt) {
  require_same_shape(pred, gt, "match_instances");
  IouTable t;
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> joint;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto g = gt[i];
    const auto p = pred[i];
    if (g < 0 || p < 0) throw Error(ErrorCode::kInvalidArgument, "negative label");
    if (g > 0) ++t.gt_area[g];
    if (p > 0) ++t.pred_area[p];
    if (g > 0 && p > 0) ++joint[{g, p}];
  }
  t.candidates.reserve(joint.size());
  for (const auto& [ids, inter] : joint) {
    const auto ga = t.gt_area[ids.first];
    const auto pa = t.pred_area[ids.second];
    const double iou = static_cast<double>(inter) / static_cast<double>(ga + pa - inter);
    t.candidates.push_back({ids.first, ids.second, iou, inter, ga, pa});
  }
  std::stable_sort(t.candidates.begin(), t.candidates.end(),
                   [](const MatchedPair& a, const MatchedPair& b) { return a.iou > b.iou; });
  return t;
}

MatchResult greedy(const IouTable& t, double tau) {
  MatchResult r;
  r.tau = tau;
  std::map<std::int32_t, bool> gt_used;
  std::map<std::int32_t, bool> pred_used;
  for (const auto& c : t.candidates) {
    if (!(c.iou > tau)) break;
    if (gt_used[c.gt_id] || pred_used[c.pred_id]) continue;
    gt_used[c.gt_id] = true;
    pred_used[c.pred_id] = true;
    r.pairs.push_back(c);
  }
  for (const auto& [id, area] : t.gt_area) {
    if (!gt_used[id]) r.unmatched_gt.push_back(id);
  }
  for (const auto& [id, area] : t.pred_area) {
    if (!pred_used[id]) r.unmatched_pred.push_back(id);
  }
  r.tp = static_cast<std::int64_t>(r.pairs.size());
  r.fp = static_cast<std::int64_t>(t.pred_area.size()) - r.tp;
  r.fn = static_cast<std::int64_t>(t.gt_area.size()) - r.tp;
  return r;
}

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

MatchResult match_instances(const LabelField& pred, const LabelField& gt, double tau) {
  require_tau(tau);
  return greedy(build_table(pred, gt), tau);
}

double object_accuracy(std::span<const MatchResult> results) {
  if (results.empty()) throw Error(ErrorCode::kInvalidArgument, "object_accuracy needs at least one image");
  std::vector<double> per_image;
  per_image.reserve(results.size());
  for (const auto& r : results) {
    const auto den = r.tp + r.fp + r.fn;
    per_image.push_back(den == 0 ? 1.0 : static_cast<double>(r.tp) / static_cast<double>(den));
  }
  return pairwise_sum(per_image) / static_cast<double>(per_image.size());
}

PrecisionRecallF1 precision_recall_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp == 0 && fp == 0 && fn == 0) return {1.0, 1.0, 1.0};
  PrecisionRecallF1 out;
  out.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  out.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  out.f1 = ratio(2.0 * out.precision * out.recall, out.precision + out.recall);
  return out;
}

PrecisionRecallF1 precision_recall_f1(const MatchResult& result) {
  return precision_recall_f1(result.tp, result.fp, result.fn);
}

DiceJaccard average_dice_and_jaccard(const MatchResult& result, const LabelField& pred,
                                     const LabelField& gt) {
  require_same_shape(pred, gt, "average_dice_and_jaccard");
  if (result.pairs.empty()) return {};
  std::map<std::int32_t, std::size_t> slot_of_gt;
  for (std::size_t k = 0; k < result.pairs.size(); ++k) slot_of_gt[result.pairs[k].gt_id] = k;
  std::map<std::int32_t, std::int32_t> partner;
  for (const auto& p : result.pairs) partner[p.pred_id] = p.gt_id;

  const std::size_t n = result.pairs.size();
  std::vector<std::int64_t> inter(n, 0), ga(n, 0), pa(n, 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (auto it = slot_of_gt.find(gt[i]); it != slot_of_gt.end()) {
      ++ga[it->second];
      if (pred[i] == result.pairs[it->second].pred_id) ++inter[it->second];
    }
    if (auto it = partner.find(pred[i]); it != partner.end()) ++pa[slot_of_gt[it->second]];
  }
  std::vector<double> dice(n), jac(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = static_cast<double>(inter[k]);
    dice[k] = 2.0 * a / static_cast<double>(ga[k] + pa[k]);
    jac[k] = a / static_cast<double>(ga[k] + pa[k] - inter[k]);
  }
  return {pairwise_sum(dice) / static_cast<double>(n), pairwise_sum(jac) / static_cast<double>(n)};
}

PanopticQuality panoptic_dq_sq(const MatchResult& result) {
  PanopticQuality q;
  const double den = static_cast<double>(result.tp) + 0.5 * static_cast<double>(result.fp + result.fn);
  q.dq = den > 0.0 ? static_cast<double>(result.tp) / den : 1.0;
  if (!result.pairs.empty()) {
    std::vector<double> ious;
    ious.reserve(result.pairs.size());
    for (const auto& p : result.pairs) ious.push_back(p.iou);
    q.sq = pairwise_sum(ious) / static_cast<double>(ious.size());
  }
  return q;
}

MetricReport evaluate(const LabelField& pred, const LabelField& gt, double tau) {
  MetricReport r;
  r.match = match_instances(pred, gt, tau);
  r.object_accuracy = object_accuracy(std::span<const MatchResult>(&r.match, 1));
  r.prf = precision_recall_f1(r.match);
  r.dice_jaccard = average_dice_and_jaccard(r.match, pred, gt);
  r.panoptic = panoptic_dq_sq(r.match);
  return r;
}

std::vector<CurvePoint> f1_curve(std::span<const LabelField> preds, std::span<const LabelField> gts,
                                 std::span<const double> taus, int jobs) {
  if (preds.size() != gts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction and ground-truth lists differ in length");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    require_tau(taus[i]);
    if (i > 0 && !(taus[i] > taus[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "taus must be strictly increasing");
    }
  }
  // per_image[i][t] = (tp, fp, fn)
  std::vector<std::vector<std::array<std::int64_t, 3>>> per_image(preds.size());
  parallel_for(preds.size(), jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto table = build_table(preds[i], gts[i]);
      for (double tau : taus) {
        const auto m = greedy(table, tau);
        per_image[i].push_back({m.tp, m.fp, m.fn});
      }
    }
  });
  std::vector<CurvePoint> curve;
  curve.reserve(taus.size());
  for (std::size_t t = 0; t < taus.size(); ++t) {
    CurvePoint p{taus[t]};
    for (const auto& img : per_image) {
      p.tp += img[t][0];
      p.fp += img[t][1];
      p.fn += img[t][2];
    }
    p.f1 = precision_recall_f1(p.tp, p.fp, p.fn).f1;
    curve.push_back(p);
  }
  return curve;
}

}  // namespace sketchdist
