#include "pct/pipeline/sampler.h"

#include <algorithm>

namespace pct {
namespace {

double Draw(Rng& rng, const std::pair<double, double>& range) {
  return Uniform(rng, range.first, range.second);
}

}  // namespace

ScenarioParams SampleScenario(Rng& rng, const ScenarioParams& base, const ScenarioRanges& ranges) {
  ScenarioParams p = base;
  p.adoption_rate = Draw(rng, ranges.adoption_rate);
  const double c1 = Draw(rng, ranges.carefulness);
  const double c2 = Draw(rng, ranges.carefulness);
  p.carefulness_lo = std::min(c1, c2);
  p.carefulness_hi = std::max(c1, c2);
  p.init_exposed_frac = Draw(rng, ranges.init_exposed_frac);
  p.oracle_add_noise = Draw(rng, ranges.oracle_add_noise);
  p.oracle_mul_noise = Draw(rng, ranges.oracle_mul_noise);
  p.mobility_factor = Draw(rng, ranges.mobility_factor);
  p.symptom_dropout = Draw(rng, ranges.symptom_dropout);
  p.symptom_dropin = Draw(rng, ranges.symptom_dropin);
  p.quarantine_dropout_test = Draw(rng, ranges.quarantine_dropout_test);
  p.quarantine_dropout_household = Draw(rng, ranges.quarantine_dropout_household);
  p.all_levels_dropout = Draw(rng, ranges.all_levels_dropout);
  p.seed = rng();
  return p;
}

}  // namespace pct
