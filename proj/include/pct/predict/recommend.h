#ifndef PCT_PREDICT_RECOMMEND_H_
#define PCT_PREDICT_RECOMMEND_H_

#include <array>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/epi/types.h"

namespace pct {

// Predicted infectiousness for today (entry 0) and the 14 previous days.
using History = std::array<double, kWindowDays>;

// Maps today's predicted infectiousness to a behavior level: the level is
// the number of thresholds at or below the prediction.
struct RecommendationMap {
  std::array<double, 3> thresholds = {0.05, 0.2, 0.5};

  absl::Status Validate() const;
};

absl::StatusOr<RecommendationMap> RecommendationMapFromJson(const Json& j,
                                                            const std::string& path);
Json RecommendationMapToJson(const RecommendationMap& map);

absl::StatusOr<int> Recommend(double today, const RecommendationMap& map);
// Unchecked variant for finite inputs.
int RecommendLevel(double today, const RecommendationMap& map);

}  // namespace pct

#endif  // PCT_PREDICT_RECOMMEND_H_
