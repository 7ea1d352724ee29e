#include "pct/epi/scenario.h"

#include <cmath>
#include <iterator>

namespace pct {
namespace {

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

absl::Status ScenarioParams::Validate() const {
  auto fail = [](absl::string_view key, absl::string_view msg) {
    return absl::InvalidArgumentError(absl::StrCat("scenario.", key, ": ", msg));
  };
  if (!InUnit(adoption_rate)) return fail("adoption_rate", "must be in [0,1]");
  if (!adoption_is_uptake && adoption_rate > 0.70 + 1e-12) {
    return fail("adoption_rate", "population adoption above 70% is not reachable");
  }
  if (!InUnit(carefulness_lo) || !InUnit(carefulness_hi) || carefulness_lo > carefulness_hi) {
    return fail("carefulness_range", "must satisfy 0 <= lo <= hi <= 1");
  }
  if (!InUnit(init_exposed_frac)) return fail("init_exposed_frac", "must be in [0,1]");
  if (oracle_add_noise < 0) return fail("oracle_add_noise", "must be >= 0");
  if (oracle_mul_noise < 0) return fail("oracle_mul_noise", "must be >= 0");
  if (mobility_factor < 0) return fail("mobility_factor", "must be >= 0");
  if (!InUnit(symptom_dropout)) return fail("symptom_dropout", "must be in [0,1]");
  if (!InUnit(symptom_dropin)) return fail("symptom_dropin", "must be in [0,1]");
  if (!InUnit(quarantine_dropout_test)) return fail("quarantine_dropout_test", "must be in [0,1]");
  if (!InUnit(quarantine_dropout_household)) {
    return fail("quarantine_dropout_household", "must be in [0,1]");
  }
  if (!InUnit(all_levels_dropout)) return fail("all_levels_dropout", "must be in [0,1]");
  if (transmission_scale < 0) return fail("transmission_scale", "must be >= 0");
  if (carefulness_damping < 0) return fail("carefulness_damping", "must be >= 0");
  return absl::OkStatus();
}

absl::StatusOr<ScenarioParams> ScenarioFromJson(const Json& j, const std::string& path,
                                                ScenarioParams p) {
  ObjectReader r(j, path);
  r.Read("adoption_rate", &p.adoption_rate)
      .Read("adoption_is_uptake", &p.adoption_is_uptake)
      .Read("init_exposed_frac", &p.init_exposed_frac)
      .Read("oracle_add_noise", &p.oracle_add_noise)
      .Read("oracle_mul_noise", &p.oracle_mul_noise)
      .Read("mobility_factor", &p.mobility_factor)
      .Read("symptom_dropout", &p.symptom_dropout)
      .Read("symptom_dropin", &p.symptom_dropin)
      .Read("quarantine_dropout_test", &p.quarantine_dropout_test)
      .Read("quarantine_dropout_household", &p.quarantine_dropout_household)
      .Read("all_levels_dropout", &p.all_levels_dropout)
      .Read("transmission_scale", &p.transmission_scale)
      .Read("carefulness_damping", &p.carefulness_damping)
      .Read("seed", &p.seed);
  if (const Json* range = r.Lookup("carefulness_range")) {
    if (!range->is_array() || range->size() != 2) {
      r.Fail("carefulness_range", "expected [lo, hi]");
    } else {
      p.carefulness_lo = (*range)[0].get<double>();
      p.carefulness_hi = (*range)[1].get<double>();
    }
  }
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = p.Validate(); !s.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, s.message().substr(absl::string_view("scenario").size())));
  }
  return p;
}

Json ScenarioToJson(const ScenarioParams& p) {
  return Json{{"adoption_rate", p.adoption_rate},
              {"adoption_is_uptake", p.adoption_is_uptake},
              {"carefulness_range", {p.carefulness_lo, p.carefulness_hi}},
              {"init_exposed_frac", p.init_exposed_frac},
              {"oracle_add_noise", p.oracle_add_noise},
              {"oracle_mul_noise", p.oracle_mul_noise},
              {"mobility_factor", p.mobility_factor},
              {"symptom_dropout", p.symptom_dropout},
              {"symptom_dropin", p.symptom_dropin},
              {"quarantine_dropout_test", p.quarantine_dropout_test},
              {"quarantine_dropout_household", p.quarantine_dropout_household},
              {"all_levels_dropout", p.all_levels_dropout},
              {"transmission_scale", p.transmission_scale},
              {"carefulness_damping", p.carefulness_damping},
              {"seed", p.seed}};
}

double SmartphoneShare() {
  // Average of population/uptake over the non-trivial table rows.
  double sum = 0.0;
  int n = 0;
  for (const AdoptionPoint& pt : kAdoptionTable) {
    if (pt.population_pct < 30.0) continue;
    sum += pt.population_pct / pt.uptake_pct;
    ++n;
  }
  return sum / n;
}

absl::StatusOr<double> UptakeForPopulation(double population_fraction) {
  const double pct = population_fraction * 100.0;
  if (pct < 0.0) return absl::InvalidArgumentError("negative adoption");
  constexpr size_t n = std::size(kAdoptionTable);
  if (pct > kAdoptionTable[n - 1].population_pct + 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("adoption ", pct, "% exceeds the smartphone-owner population"));
  }
  for (size_t i = 1; i < n; ++i) {
    const AdoptionPoint& a = kAdoptionTable[i - 1];
    const AdoptionPoint& b = kAdoptionTable[i];
    if (pct <= b.population_pct) {
      double t = (pct - a.population_pct) / (b.population_pct - a.population_pct);
      return (a.uptake_pct + t * (b.uptake_pct - a.uptake_pct)) / 100.0;
    }
  }
  return kAdoptionTable[n - 1].uptake_pct / 100.0;
}

double PopulationForUptake(double uptake_fraction) {
  const double pct = std::clamp(uptake_fraction * 100.0, 0.0, 100.0);
  constexpr size_t n = std::size(kAdoptionTable);
  for (size_t i = 1; i < n; ++i) {
    const AdoptionPoint& a = kAdoptionTable[i - 1];
    const AdoptionPoint& b = kAdoptionTable[i];
    if (pct <= b.uptake_pct) {
      double t = (pct - a.uptake_pct) / (b.uptake_pct - a.uptake_pct);
      return (a.population_pct + t * (b.population_pct - a.population_pct)) / 100.0;
    }
  }
  return pct / 100.0 * SmartphoneShare();
}

}  // namespace pct
