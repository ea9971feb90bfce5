#pragma once

#include <string>
#include <vector>

#include "sketchdist/raster.hpp"

namespace sketchdist::testing {

// Small labelings with metric values worked out by hand at tau = 0.5.
struct MetricFixture {
  std::string name;
  LabelField gt;
  LabelField pred;
  std::int64_t tp, fp, fn;
  double oa, precision, recall, f1, dice, jaccard, dq, sq;
};

inline std::vector<MetricFixture> metric_fixtures() {
  using L = std::vector<std::int32_t>;
  std::vector<MetricFixture> out;
  // gt1 vs pred1: 3 of 4 pixels (IoU 3/4); gt2 = pred2 exactly
  out.push_back({"blocks",
                 LabelField(4, 4, L{1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 2, 2, 0, 0, 2, 2}),
                 LabelField(4, 4, L{1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 2, 2, 0, 0, 2, 2}),
                 2, 0, 0,
                 1.0, 1.0, 1.0, 1.0, (6.0 / 7.0 + 1.0) / 2.0, (0.75 + 1.0) / 2.0, 1.0, 0.875});
  // IoUs 3/4 and 2/3 accepted; gt3 vs pred4 at exactly 1/2 is rejected
  out.push_back({"strict_threshold",
                 LabelField(10, 1, L{1, 1, 1, 1, 2, 2, 0, 0, 3, 3}),
                 LabelField(10, 1, L{1, 1, 1, 0, 2, 2, 2, 0, 0, 4}),
                 2, 1, 1,
                 0.5, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 29.0 / 35.0, 17.0 / 24.0, 2.0 / 3.0,
                 17.0 / 24.0});
  // IoUs 0.6 and 0.8 plus two spurious predictions
  out.push_back({"spurious",
                 LabelField(15, 1, L{1, 1, 1, 1, 1, 0, 2, 2, 2, 2, 2, 0, 0, 0, 0}),
                 LabelField(15, 1, L{1, 1, 1, 0, 0, 0, 2, 2, 2, 2, 0, 0, 3, 0, 4}),
                 2, 2, 0,
                 0.5, 0.5, 1.0, 2.0 / 3.0, 59.0 / 72.0, 0.7, 2.0 / 3.0, 0.7});
  return out;
}

}  // namespace sketchdist::testing
