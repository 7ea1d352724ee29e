#include "pct/predict/baselines.h"

#include <algorithm>
#include <cmath>

namespace pct {

History PredictNoTracing(const Observables&, const RecommendationMap& map) {
  History h;
  h.fill(map.thresholds[0]);
  return h;
}

int BinaryTracingLevel(Day last_notice_day, Day target_day, int quarantine_days) {
  if (last_notice_day == kNoDay) return 1;
  const bool active = target_day > last_notice_day &&
                      target_day <= last_notice_day + quarantine_days;
  return active ? kQuarantineLevel : 1;
}

absl::Status HeuristicRules::Validate() const {
  auto fail = [](absl::string_view key, absl::string_view msg) {
    return absl::InvalidArgumentError(absl::StrCat("heuristic.", key, ": ", msg));
  };
  if (positive_value < 0) return fail("positive_value", "must be >= 0");
  if (positive_lookback_days < 0) return fail("positive_lookback_days", "must be >= 0");
  if (per_symptom < 0) return fail("per_symptom", "must be >= 0");
  for (double w : symptom_weights) {
    if (w < 0) return fail("symptom_weights", "must be >= 0");
  }
  if (cluster_scale < 0) return fail("cluster_scale", "must be >= 0");
  if (cluster_decay < 0 || cluster_decay > 1) return fail("cluster_decay", "must be in [0,1]");
  if (negative_factor < 0 || negative_factor > 1) {
    return fail("negative_factor", "must be in [0,1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<HeuristicRules> HeuristicRulesFromJson(const Json& j, const std::string& path) {
  HeuristicRules rules;
  ObjectReader r(j, path);
  r.Read("positive_value", &rules.positive_value)
      .Read("positive_lookback_days", &rules.positive_lookback_days)
      .Read("per_symptom", &rules.per_symptom)
      .Read("cluster_scale", &rules.cluster_scale)
      .Read("cluster_decay", &rules.cluster_decay)
      .Read("negative_factor", &rules.negative_factor);
  if (const Json* w = r.Lookup("symptom_weights")) {
    if (!w->is_object()) {
      r.Fail("symptom_weights", "expected an object of symptom name to weight");
    } else {
      for (const auto& [name, value] : w->items()) {
        auto it = std::find(kSymptomNames.begin(), kSymptomNames.end(), name);
        if (it == kSymptomNames.end()) {
          r.Fail("symptom_weights", absl::StrCat("unknown symptom '", name, "'"));
        } else if (!value.is_number()) {
          r.Fail("symptom_weights", "weights must be numbers");
        } else {
          rules.symptom_weights[it - kSymptomNames.begin()] = value.get<double>();
        }
      }
    }
  }
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = rules.Validate(); !s.ok()) return s;
  return rules;
}

Json HeuristicRulesToJson(const HeuristicRules& rules) {
  Json weights = Json::object();
  for (int k = 0; k < kNumSymptoms; ++k) {
    weights[std::string(kSymptomNames[k])] = rules.symptom_weights[k];
  }
  return Json{{"positive_value", rules.positive_value},
              {"positive_lookback_days", rules.positive_lookback_days},
              {"per_symptom", rules.per_symptom},
              {"symptom_weights", weights},
              {"cluster_scale", rules.cluster_scale},
              {"cluster_decay", rules.cluster_decay},
              {"negative_factor", rules.negative_factor}};
}

History PredictHeuristic(const Observables& obs, const HeuristicRules& rules) {
  History h{};
  for (int k = 0; k < kWindowDays; ++k) {
    const HealthStatus& s = obs.statuses[k];
    double score = 0.0;
    for (int sym = 0; sym < kNumSymptoms; ++sym) {
      if (s.reported_symptoms.test(sym)) score += rules.per_symptom * rules.symptom_weights[sym];
    }
    h[k] = score;
  }

  std::array<int, kWindowDays> max_level;
  max_level.fill(-1);
  for (const Cluster& c : obs.clusters) {
    if (c.day_offset < 0 || c.day_offset >= kWindowDays) continue;
    max_level[c.day_offset] = std::max(max_level[c.day_offset], c.risk_level);
  }
  for (int k = 0; k < kWindowDays; ++k) {
    double best = 0.0;
    double decay = 1.0;
    for (int j = k; j < kWindowDays; ++j, decay *= rules.cluster_decay) {
      if (max_level[j] < 0) continue;
      best = std::max(best, max_level[j] / 15.0 * rules.cluster_scale * decay);
    }
    h[k] += best;
  }

  Day positive_result_day = kNoDay;
  for (const HealthStatus& s : obs.statuses) {
    if (s.test_result == TestResult::kNegative) {
      for (double& v : h) v *= rules.negative_factor;
    } else if (s.test_result == TestResult::kPositive) {
      positive_result_day = std::max(positive_result_day, s.test_result_day);
    }
  }
  if (positive_result_day != kNoDay) {
    const Day first = positive_result_day - rules.positive_lookback_days;
    for (int k = 0; k < kWindowDays; ++k) {
      if (obs.today - k >= first) h[k] = std::max(h[k], rules.positive_value);
    }
  }
  return h;
}

absl::StatusOr<History> PredictNoisyOracle(const History& truth, double add_noise,
                                           double mul_noise, Rng& rng) {
  if (add_noise < 0 || mul_noise < 0 || std::isnan(add_noise) || std::isnan(mul_noise)) {
    return absl::InvalidArgumentError("oracle noise scales must be non-negative");
  }
  History out;
  for (int k = 0; k < kWindowDays; ++k) {
    const double um = mul_noise > 0 ? Uniform(rng, -mul_noise, mul_noise) : 0.0;
    const double ua = add_noise > 0 ? Uniform(rng, -add_noise, add_noise) : 0.0;
    out[k] = std::max(0.0, truth[k] * (1.0 + um) + ua);
  }
  return out;
}

}  // namespace pct
