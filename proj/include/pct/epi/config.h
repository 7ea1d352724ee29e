#ifndef PCT_EPI_CONFIG_H_
#define PCT_EPI_CONFIG_H_

#include <array>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/epi/disease.h"
#include "pct/epi/types.h"

namespace pct {

// Out-of-household contact multiplier per behavior level. Level 1 is the
// post-lockdown baseline; level 3 is quarantine (household contacts only).
struct BehaviorConfig {
  std::array<double, kNumBehaviorLevels> level_multipliers = {1.3, 1.0, 0.5, 0.0};
};

absl::StatusOr<double> MobilityMultiplier(const BehaviorConfig& config, int level);

struct TestingConfig {
  // Daily probability of seeking a test is seek_rate * carefulness for app
  // users reporting at least one symptom.
  double seek_rate = 0.5;
  int result_delay_days = 2;
  double false_negative_rate = 0.25;
};

struct WorldConfig {
  int num_agents = 1000;
  int horizon_days = 50;
  int household_min = 1;
  int household_max = 5;
  // Repeated encounters between household members per day: 1 + Poisson(mean).
  double household_extra_encounters = 1.0;
  // Mean out-of-household contacts per agent-day at mobility factor 1 and
  // behavior level 1.
  double base_contact_rate = 5.0;
  int quarantine_days = 14;
  bool carefulness_affects_transmission = true;
  bool carefulness_affects_reporting = true;
  // Reported-symptom dropout is scaled by (1 - reporting_damping * carefulness).
  double reporting_damping = 0.5;
  // When in 0..3, every agent is recommended this level (null-model runs).
  int force_level = -1;
  bool log_contacts = false;
  BehaviorConfig behavior;
  TestingConfig testing;
  DiseaseConfig disease;

  absl::Status Validate() const;
};

absl::StatusOr<WorldConfig> WorldConfigFromJson(const Json& j, const std::string& path,
                                                WorldConfig base = {});
Json WorldConfigToJson(const WorldConfig& c);

}  // namespace pct

#endif  // PCT_EPI_CONFIG_H_
