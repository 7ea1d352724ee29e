#ifndef PCT_EPI_SCENARIO_H_
#define PCT_EPI_SCENARIO_H_

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pct/common/json_util.h"

namespace pct {

// One point of the scenario space driving a single simulation run.
struct ScenarioParams {
  // Fraction of the population with the app (or of smartphone owners when
  // adoption_is_uptake is set).
  double adoption_rate = 0.6;
  bool adoption_is_uptake = false;
  double carefulness_lo = 0.5;
  double carefulness_hi = 0.8;
  double init_exposed_frac = 0.004;
  double oracle_add_noise = 0.1;
  double oracle_mul_noise = 0.5;
  double mobility_factor = 0.6;
  double symptom_dropout = 0.35;
  double symptom_dropin = 0.0005;
  double quarantine_dropout_test = 0.02;
  double quarantine_dropout_household = 0.035;
  double all_levels_dropout = 0.03;
  // Per-encounter transmission: p = beta * infectiousness * (1 - kappa * c).
  double transmission_scale = 0.088;
  double carefulness_damping = 0.5;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

absl::StatusOr<ScenarioParams> ScenarioFromJson(const Json& j,
                                                const std::string& path,
                                                ScenarioParams base = {});
Json ScenarioToJson(const ScenarioParams& p);

// Smartphone-uptake lookup: population share with the app versus the share
// of smartphone owners that must install it.
struct AdoptionPoint {
  double population_pct;
  double uptake_pct;
};
inline constexpr AdoptionPoint kAdoptionTable[] = {
    {0.0, 0.0}, {1.0, 1.50}, {30.0, 42.15}, {40.0, 56.18}, {60.0, 84.15}, {70.0, 98.31}};

// Fraction of the population owning a smartphone implied by the table.
double SmartphoneShare();

// Linear interpolation in the table. Population fractions above the table
// range are rejected.
absl::StatusOr<double> UptakeForPopulation(double population_fraction);
double PopulationForUptake(double uptake_fraction);

}  // namespace pct

#endif  // PCT_EPI_SCENARIO_H_
