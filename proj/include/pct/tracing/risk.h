#ifndef PCT_TRACING_RISK_H_
#define PCT_TRACING_RISK_H_

#include <array>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"

namespace pct {

// A 4-bit risk level, 0..15.
using RiskLevel = int;
inline constexpr int kNumRiskLevels = 16;
inline constexpr int kNumRiskThresholds = kNumRiskLevels - 1;
// Marks "no previous level" on the first message for an encounter.
inline constexpr RiskLevel kNoRiskLevel = -1;

// 15 strictly increasing positive thresholds. Bin 0 is [0, t_1), bin k is
// [t_k, t_{k+1}) and bin 15 is [t_15, inf).
class RiskBinTable {
 public:
  using Thresholds = std::array<double, kNumRiskThresholds>;

  static absl::StatusOr<RiskBinTable> Create(const Thresholds& thresholds);
  // Thresholds k/16, k = 1..15.
  static RiskBinTable Uniform();

  // Index of the bin containing `risk`; NaN is rejected.
  absl::StatusOr<RiskLevel> Quantize(double risk) const;
  // Same as Quantize for callers that already guarantee a finite input.
  RiskLevel Level(double risk) const;

  const Thresholds& thresholds() const { return thresholds_; }

 private:
  explicit RiskBinTable(const Thresholds& t) : thresholds_(t) {}
  Thresholds thresholds_;
};

// Equal-mass table from calibration risks: threshold k is the empirical
// k/16 quantile (the element at rank floor(k*n/16) of the sorted sample),
// nudged up by one ulp past its predecessor whenever quantiles coincide.
// Needs at least 16 distinct values.
absl::StatusOr<RiskBinTable> FitBins(std::span<const double> risks);

// JSON array of 15 numbers. Doubles print in shortest round-trip form so
// Save/Load is bit-exact.
Json RiskBinTableToJson(const RiskBinTable& table);
absl::StatusOr<RiskBinTable> RiskBinTableFromJson(const Json& j);

// Fraction of `risks` falling in each bin.
std::array<double, kNumRiskLevels> BinMasses(const RiskBinTable& table,
                                             std::span<const double> risks);

}  // namespace pct

#endif  // PCT_TRACING_RISK_H_
