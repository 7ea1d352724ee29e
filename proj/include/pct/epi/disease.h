#ifndef PCT_EPI_DISEASE_H_
#define PCT_EPI_DISEASE_H_

#include <array>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/common/rng.h"
#include "pct/epi/scenario.h"
#include "pct/epi/types.h"

namespace pct {

// Per-agent virology. The infectiousness curve is triangular: zero during
// the latent period, rising linearly to `peak` at incubation_days, then
// decaying linearly to zero over the recovery tail.
struct DiseaseConfig {
  int latent_min_days = 1;
  int latent_max_days = 3;
  double incubation_mean_days = 5.0;
  double incubation_shape = 4.0;
  int incubation_max_days = 21;
  double peak_min = 0.3;
  double peak_max = 1.0;
  int tail_min_days = 7;
  int tail_max_days = 14;
  double asymptomatic_prob = 0.25;
  // Presence probability of each symptom at onset, in kSymptomNames order.
  std::array<double, kNumSymptoms> symptom_probs = {
      0.65, 0.55, 0.5, 0.3, 0.3, 0.35, 0.2, 0.3, 0.2, 0.1, 0.1, 0.15};

  absl::Status Validate() const;
};

absl::StatusOr<DiseaseConfig> DiseaseConfigFromJson(const Json& j, const std::string& path,
                                                     DiseaseConfig base = {});
Json DiseaseConfigToJson(const DiseaseConfig& c);

// curve[k] for k = 0 .. incubation + tail - 1 (days since exposure).
std::vector<double> MakeTriangularCurve(int latent_days, int incubation_days,
                                        int recovery_tail_days, double peak);

// Samples the course of an infection that starts on `day`.
DiseaseState SampleInfection(const DiseaseConfig& config, Day day, Rng& rng);

// Compartment implied by the disease course on `day`.
Compartment CompartmentOn(const DiseaseState& state, Day day);

double TransmissionProbability(double infectiousness, double susceptible_carefulness,
                               const ScenarioParams& params);

// One qualifying encounter between an infectious and a susceptible agent.
bool DrawTransmission(double infectiousness, double susceptible_carefulness,
                      const ScenarioParams& params, Rng& rng);

}  // namespace pct

#endif  // PCT_EPI_DISEASE_H_
