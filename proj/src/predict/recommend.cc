#include "pct/predict/recommend.h"

#include <cmath>

#include "pct/common/check.h"

namespace pct {

absl::Status RecommendationMap::Validate() const {
  for (size_t k = 0; k < thresholds.size(); ++k) {
    if (!std::isfinite(thresholds[k])) {
      return absl::InvalidArgumentError("recommendation thresholds must be finite");
    }
    if (k > 0 && thresholds[k] <= thresholds[k - 1]) {
      return absl::InvalidArgumentError("recommendation thresholds must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RecommendationMap> RecommendationMapFromJson(const Json& j,
                                                            const std::string& path) {
  RecommendationMap map;
  ObjectReader r(j, path);
  r.Read("thresholds", &map.thresholds);
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = map.Validate(); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ".thresholds: ", s.message()));
  }
  return map;
}

Json RecommendationMapToJson(const RecommendationMap& map) {
  return Json{{"thresholds", map.thresholds}};
}

int RecommendLevel(double today, const RecommendationMap& map) {
  PCT_CHECK(!std::isnan(today), "recommendation input is NaN");
  int level = 0;
  for (double t : map.thresholds) level += t <= today ? 1 : 0;
  return level;
}

absl::StatusOr<int> Recommend(double today, const RecommendationMap& map) {
  if (std::isnan(today)) return absl::InvalidArgumentError("recommendation input is NaN");
  return RecommendLevel(today, map);
}

}  // namespace pct
