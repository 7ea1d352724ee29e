#include "pct/tracing/observables.h"

namespace pct {

Observables BuildObservables(const World& world, AgentId id, Day today,
                             std::vector<Cluster> clusters) {
  Observables obs;
  obs.today = today;
  const AgentProfile& p = world.profile(id);
  obs.profile = {p.age, p.sex, p.conditions};
  for (int k = 0; k < kWindowDays; ++k) {
    obs.statuses[k] = world.StatusOn(id, today - k).VisibleOn(today);
  }
  obs.clusters = std::move(clusters);
  return obs;
}

}  // namespace pct
