#include "pct/epi/disease.h"

#include <algorithm>
#include <cmath>

namespace pct {

absl::string_view CompartmentName(Compartment c) {
  switch (c) {
    case Compartment::kSusceptible:
      return "S";
    case Compartment::kExposed:
      return "E";
    case Compartment::kInfectious:
      return "I";
    case Compartment::kRecovered:
      return "R";
  }
  return "?";
}

HealthStatus HealthStatus::VisibleOn(Day today) const {
  HealthStatus v = *this;
  if (test_result_day == kNoDay || test_result_day > today) {
    v.test_result = TestResult::kNone;
    v.test_result_day = kNoDay;
  } else if (test_result == TestResult::kPendingPositive) {
    v.test_result = TestResult::kPositive;
  } else if (test_result == TestResult::kPendingNegative) {
    v.test_result = TestResult::kNegative;
  }
  return v;
}

absl::Status DiseaseConfig::Validate() const {
  auto fail = [](absl::string_view key, absl::string_view msg) {
    return absl::InvalidArgumentError(absl::StrCat("disease.", key, ": ", msg));
  };
  if (latent_min_days < 1 || latent_max_days < latent_min_days) {
    return fail("latent_days", "need 1 <= min <= max");
  }
  if (incubation_mean_days <= 0 || incubation_shape <= 0) {
    return fail("incubation", "mean and shape must be positive");
  }
  if (incubation_max_days <= latent_max_days) {
    return fail("incubation_max_days", "must exceed latent_max_days");
  }
  if (peak_min < 0 || peak_max > 1 || peak_min > peak_max) {
    return fail("peak", "need 0 <= min <= max <= 1");
  }
  if (tail_min_days < 1 || tail_max_days < tail_min_days) {
    return fail("tail_days", "need 1 <= min <= max");
  }
  if (asymptomatic_prob < 0 || asymptomatic_prob > 1) {
    return fail("asymptomatic_prob", "must be in [0,1]");
  }
  for (double p : symptom_probs) {
    if (p < 0 || p > 1) return fail("symptom_probs", "must be in [0,1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<DiseaseConfig> DiseaseConfigFromJson(const Json& j, const std::string& path,
                                                    DiseaseConfig c) {
  ObjectReader r(j, path);
  r.Read("latent_min_days", &c.latent_min_days)
      .Read("latent_max_days", &c.latent_max_days)
      .Read("incubation_mean_days", &c.incubation_mean_days)
      .Read("incubation_shape", &c.incubation_shape)
      .Read("incubation_max_days", &c.incubation_max_days)
      .Read("peak_min", &c.peak_min)
      .Read("peak_max", &c.peak_max)
      .Read("tail_min_days", &c.tail_min_days)
      .Read("tail_max_days", &c.tail_max_days)
      .Read("asymptomatic_prob", &c.asymptomatic_prob)
      .Read("symptom_probs", &c.symptom_probs);
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

Json DiseaseConfigToJson(const DiseaseConfig& c) {
  return Json{{"latent_min_days", c.latent_min_days},
              {"latent_max_days", c.latent_max_days},
              {"incubation_mean_days", c.incubation_mean_days},
              {"incubation_shape", c.incubation_shape},
              {"incubation_max_days", c.incubation_max_days},
              {"peak_min", c.peak_min},
              {"peak_max", c.peak_max},
              {"tail_min_days", c.tail_min_days},
              {"tail_max_days", c.tail_max_days},
              {"asymptomatic_prob", c.asymptomatic_prob},
              {"symptom_probs", c.symptom_probs}};
}

std::vector<double> MakeTriangularCurve(int latent_days, int incubation_days,
                                        int recovery_tail_days, double peak) {
  std::vector<double> curve(incubation_days + recovery_tail_days, 0.0);
  const int rise = incubation_days - latent_days + 1;
  for (int k = latent_days; k <= incubation_days; ++k) {
    curve[k] = peak * static_cast<double>(k - latent_days + 1) / rise;
  }
  for (int k = incubation_days + 1; k < incubation_days + recovery_tail_days; ++k) {
    curve[k] = peak * (1.0 - static_cast<double>(k - incubation_days) / recovery_tail_days);
  }
  return curve;
}

DiseaseState SampleInfection(const DiseaseConfig& config, Day day, Rng& rng) {
  DiseaseState s;
  s.compartment = Compartment::kExposed;
  s.day_exposed = day;
  s.latent_days = UniformInt(rng, config.latent_min_days, config.latent_max_days);
  std::gamma_distribution<double> gamma(config.incubation_shape,
                                        config.incubation_mean_days / config.incubation_shape);
  int incubation = static_cast<int>(std::lround(gamma(rng)));
  s.incubation_days =
      std::clamp(incubation, s.latent_days + 1, config.incubation_max_days);
  s.recovery_tail_days = UniformInt(rng, config.tail_min_days, config.tail_max_days);
  const double peak = Uniform(rng, config.peak_min, config.peak_max);
  s.infectiousness_curve =
      MakeTriangularCurve(s.latent_days, s.incubation_days, s.recovery_tail_days, peak);
  s.is_asymptomatic = Bernoulli(rng, config.asymptomatic_prob);
  if (!s.is_asymptomatic) {
    s.symptom_onset_day = day + s.incubation_days;
    for (int k = 0; k < kNumSymptoms; ++k) {
      if (Bernoulli(rng, config.symptom_probs[k])) s.true_symptoms.set(k);
    }
    if (s.true_symptoms.none()) s.true_symptoms.set(UniformInt(rng, 0, kNumSymptoms - 1));
  }
  return s;
}

Compartment CompartmentOn(const DiseaseState& state, Day day) {
  if (!state.infected() || day < state.day_exposed) return Compartment::kSusceptible;
  const int k = day - state.day_exposed;
  if (k < state.latent_days) return Compartment::kExposed;
  if (k < static_cast<int>(state.infectiousness_curve.size())) return Compartment::kInfectious;
  return Compartment::kRecovered;
}

double TransmissionProbability(double infectiousness, double susceptible_carefulness,
                               const ScenarioParams& params) {
  const double p = params.transmission_scale * infectiousness *
                   (1.0 - params.carefulness_damping * susceptible_carefulness);
  return std::clamp(p, 0.0, 1.0);
}

bool DrawTransmission(double infectiousness, double susceptible_carefulness,
                      const ScenarioParams& params, Rng& rng) {
  const double p = TransmissionProbability(infectiousness, susceptible_carefulness, params);
  if (p <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace pct
