#include "pct/epi/config.h"

namespace pct {

absl::StatusOr<double> MobilityMultiplier(const BehaviorConfig& config, int level) {
  if (level < 0 || level >= kNumBehaviorLevels) {
    return absl::InvalidArgumentError(
        absl::StrCat("behavior level ", level, " outside 0..", kNumBehaviorLevels - 1));
  }
  return config.level_multipliers[level];
}

absl::Status WorldConfig::Validate() const {
  auto fail = [](absl::string_view key, absl::string_view msg) {
    return absl::InvalidArgumentError(absl::StrCat("world.", key, ": ", msg));
  };
  if (num_agents <= 0) return fail("num_agents", "population must be positive");
  if (horizon_days <= 0) return fail("horizon_days", "must be positive");
  if (household_min < 1 || household_max < household_min) {
    return fail("household_size", "need 1 <= min <= max");
  }
  if (household_extra_encounters < 0) return fail("household_extra_encounters", "must be >= 0");
  if (base_contact_rate < 0) return fail("base_contact_rate", "must be >= 0");
  if (quarantine_days < 0) return fail("quarantine_days", "must be >= 0");
  if (reporting_damping < 0 || reporting_damping > 1) {
    return fail("reporting_damping", "must be in [0,1]");
  }
  if (force_level < -1 || force_level >= kNumBehaviorLevels) {
    return fail("force_level", "must be -1 (off) or 0..3");
  }
  for (double m : behavior.level_multipliers) {
    if (m < 0) return fail("level_multipliers", "must be >= 0");
  }
  if (testing.seek_rate < 0 || testing.seek_rate > 1) return fail("seek_rate", "must be in [0,1]");
  if (testing.result_delay_days < 0) return fail("result_delay_days", "must be >= 0");
  if (testing.false_negative_rate < 0 || testing.false_negative_rate > 1) {
    return fail("false_negative_rate", "must be in [0,1]");
  }
  return disease.Validate();
}

absl::StatusOr<WorldConfig> WorldConfigFromJson(const Json& j, const std::string& path,
                                                WorldConfig c) {
  ObjectReader r(j, path);
  r.Read("num_agents", &c.num_agents)
      .Read("horizon_days", &c.horizon_days)
      .Read("household_min", &c.household_min)
      .Read("household_max", &c.household_max)
      .Read("household_extra_encounters", &c.household_extra_encounters)
      .Read("base_contact_rate", &c.base_contact_rate)
      .Read("quarantine_days", &c.quarantine_days)
      .Read("carefulness_affects_transmission", &c.carefulness_affects_transmission)
      .Read("carefulness_affects_reporting", &c.carefulness_affects_reporting)
      .Read("reporting_damping", &c.reporting_damping)
      .Read("force_level", &c.force_level)
      .Read("log_contacts", &c.log_contacts)
      .Read("level_multipliers", &c.behavior.level_multipliers);
  if (const Json* t = r.Lookup("testing")) {
    ObjectReader tr(*t, r.KeyPath("testing"));
    tr.Read("seek_rate", &c.testing.seek_rate)
        .Read("result_delay_days", &c.testing.result_delay_days)
        .Read("false_negative_rate", &c.testing.false_negative_rate);
    if (absl::Status s = tr.Finish(); !s.ok()) return s;
  }
  if (const Json* d = r.Lookup("disease")) {
    auto disease = DiseaseConfigFromJson(*d, r.KeyPath("disease"), c.disease);
    if (!disease.ok()) return disease.status();
    c.disease = *disease;
  }
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

Json WorldConfigToJson(const WorldConfig& c) {
  return Json{{"num_agents", c.num_agents},
              {"horizon_days", c.horizon_days},
              {"household_min", c.household_min},
              {"household_max", c.household_max},
              {"household_extra_encounters", c.household_extra_encounters},
              {"base_contact_rate", c.base_contact_rate},
              {"quarantine_days", c.quarantine_days},
              {"carefulness_affects_transmission", c.carefulness_affects_transmission},
              {"carefulness_affects_reporting", c.carefulness_affects_reporting},
              {"reporting_damping", c.reporting_damping},
              {"force_level", c.force_level},
              {"log_contacts", c.log_contacts},
              {"level_multipliers", c.behavior.level_multipliers},
              {"testing",
               {{"seek_rate", c.testing.seek_rate},
                {"result_delay_days", c.testing.result_delay_days},
                {"false_negative_rate", c.testing.false_negative_rate}}},
              {"disease", DiseaseConfigToJson(c.disease)}};
}

}  // namespace pct
