#include "pct/tracing/risk.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "pct/common/check.h"

namespace pct {

absl::StatusOr<RiskBinTable> RiskBinTable::Create(const Thresholds& thresholds) {
  for (int k = 0; k < kNumRiskThresholds; ++k) {
    const double t = thresholds[k];
    if (!std::isfinite(t) || t <= 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("risk threshold ", k + 1, " must be finite and positive, got ", t));
    }
    if (k > 0 && t <= thresholds[k - 1]) {
      return absl::InvalidArgumentError(
          absl::StrCat("risk thresholds must be strictly increasing at index ", k + 1));
    }
  }
  return RiskBinTable(thresholds);
}

RiskBinTable RiskBinTable::Uniform() {
  Thresholds t;
  for (int k = 0; k < kNumRiskThresholds; ++k) t[k] = (k + 1) / 16.0;
  return RiskBinTable(t);
}

RiskLevel RiskBinTable::Level(double risk) const {
  PCT_CHECK(!std::isnan(risk), "cannot quantize NaN");
  return static_cast<RiskLevel>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), risk) - thresholds_.begin());
}

absl::StatusOr<RiskLevel> RiskBinTable::Quantize(double risk) const {
  if (std::isnan(risk)) return absl::InvalidArgumentError("cannot quantize NaN risk");
  return Level(risk);
}

absl::StatusOr<RiskBinTable> FitBins(std::span<const double> risks) {
  std::vector<double> sorted(risks.begin(), risks.end());
  for (double r : sorted) {
    if (!std::isfinite(r)) return absl::InvalidArgumentError("calibration risks must be finite");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end());
  const auto num_distinct = distinct - sorted.begin();
  if (num_distinct < kNumRiskLevels) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need at least ", kNumRiskLevels, " distinct calibration risks, got ", num_distinct));
  }
  sorted.assign(risks.begin(), risks.end());
  std::sort(sorted.begin(), sorted.end());

  const size_t n = sorted.size();
  RiskBinTable::Thresholds t;
  double prev = 0.0;
  for (int k = 0; k < kNumRiskThresholds; ++k) {
    const size_t rank = (static_cast<size_t>(k + 1) * n) / kNumRiskLevels;
    double q = sorted[std::min(rank, n - 1)];
    if (q <= prev) q = std::nextafter(prev, std::numeric_limits<double>::infinity());
    t[k] = q;
    prev = q;
  }
  return RiskBinTable::Create(t);
}

Json RiskBinTableToJson(const RiskBinTable& table) { return Json(table.thresholds()); }

absl::StatusOr<RiskBinTable> RiskBinTableFromJson(const Json& j) {
  if (!j.is_array() || j.size() != kNumRiskThresholds) {
    return absl::InvalidArgumentError(
        absl::StrCat("risk bins: expected an array of ", kNumRiskThresholds, " numbers"));
  }
  RiskBinTable::Thresholds t;
  for (int k = 0; k < kNumRiskThresholds; ++k) {
    if (!j[k].is_number()) return absl::InvalidArgumentError("risk bins: non-numeric entry");
    t[k] = j[k].get<double>();
  }
  return RiskBinTable::Create(t);
}

std::array<double, kNumRiskLevels> BinMasses(const RiskBinTable& table,
                                             std::span<const double> risks) {
  std::array<double, kNumRiskLevels> mass{};
  if (risks.empty()) return mass;
  for (double r : risks) mass[table.Level(r)] += 1.0;
  for (double& m : mass) m /= static_cast<double>(risks.size());
  return mass;
}

}  // namespace pct
