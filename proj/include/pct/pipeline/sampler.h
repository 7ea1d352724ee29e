#ifndef PCT_PIPELINE_SAMPLER_H_
#define PCT_PIPELINE_SAMPLER_H_

#include <utility>

#include "pct/common/rng.h"
#include "pct/epi/scenario.h"

namespace pct {

// Domain-randomization intervals; every field is drawn uniformly.
struct ScenarioRanges {
  std::pair<double, double> adoption_rate{0.30, 0.60};
  std::pair<double, double> carefulness{0.5, 0.8};
  std::pair<double, double> init_exposed_frac{0.002, 0.006};
  std::pair<double, double> oracle_add_noise{0.05, 0.15};
  std::pair<double, double> oracle_mul_noise{0.2, 0.8};
  std::pair<double, double> mobility_factor{0.3, 0.9};
  std::pair<double, double> symptom_dropout{0.1, 0.6};
  std::pair<double, double> symptom_dropin{0.0001, 0.001};
  std::pair<double, double> quarantine_dropout_test{0.01, 0.03};
  std::pair<double, double> quarantine_dropout_household{0.02, 0.05};
  std::pair<double, double> all_levels_dropout{0.01, 0.05};
};

// Draws every randomized field of `base` from `ranges`; the carefulness
// interval is drawn as [lo, hi] with lo <= hi inside the range. Fields
// outside the randomized set (transmission scale, damping) keep their
// `base` values. The run seed is drawn last.
ScenarioParams SampleScenario(Rng& rng, const ScenarioParams& base = {},
                              const ScenarioRanges& ranges = {});

}  // namespace pct

#endif  // PCT_PIPELINE_SAMPLER_H_
