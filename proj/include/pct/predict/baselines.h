#ifndef PCT_PREDICT_BASELINES_H_
#define PCT_PREDICT_BASELINES_H_

#include <array>
#include <string>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/common/rng.h"
#include "pct/predict/recommend.h"
#include "pct/tracing/observables.h"

namespace pct {

// No tracing: a flat history sitting exactly on the first threshold, so
// the recommendation is always level 1.
History PredictNoTracing(const Observables& obs, const RecommendationMap& map);

// Binary tracing is a recommendation override rather than a history: a
// positive-contact notice received on day n puts the agent at level 3 on
// days n+1 .. n+quarantine_days, level 1 otherwise.
int BinaryTracingLevel(Day last_notice_day, Day target_day, int quarantine_days = 14);

// Score contributions of the rule-based heuristic. Loaded from config so
// that the rules are data, not code.
struct HeuristicRules {
  // A visible positive test sets every day from result_day - lookback to
  // today to at least this value.
  double positive_value = 1.0;
  int positive_lookback_days = 14;
  // Per reported symptom on the day it was reported; symptoms listed in
  // symptom_weights count that many times.
  double per_symptom = 0.05;
  std::array<double, kNumSymptoms> symptom_weights = {2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  // A cluster at level l received for day j adds l/15 * cluster_scale *
  // cluster_decay^(j - k) to each day k at or after the contact (k <= j in
  // offsets); the maximum over clusters is used.
  double cluster_scale = 0.4;
  double cluster_decay = 0.8;
  // Each visible negative test multiplies the whole history by this.
  double negative_factor = 0.5;

  absl::Status Validate() const;
};

absl::StatusOr<HeuristicRules> HeuristicRulesFromJson(const Json& j, const std::string& path);
Json HeuristicRulesToJson(const HeuristicRules& rules);

History PredictHeuristic(const Observables& obs, const HeuristicRules& rules);

// Ground truth corrupted per entry: max(0, y (1 + u_m) + u_a) with
// u_m ~ U(-mul, mul) and u_a ~ U(-add, add), drawn in that order.
absl::StatusOr<History> PredictNoisyOracle(const History& truth, double add_noise,
                                           double mul_noise, Rng& rng);

}  // namespace pct

#endif  // PCT_PREDICT_BASELINES_H_
