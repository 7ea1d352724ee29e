#ifndef PCT_TRACING_OBSERVABLES_H_
#define PCT_TRACING_OBSERVABLES_H_

#include <array>
#include <vector>

#include "pct/epi/types.h"
#include "pct/epi/world.h"
#include "pct/tracing/messages.h"

namespace pct {

// The self-reported part of an agent profile.
struct ReportedProfile {
  int age = 0;
  Sex sex = Sex::kFemale;
  ConditionSet conditions;
};

// Everything one device can see on one day: the reported profile, the
// daily statuses of the window and the received clusters. statuses[k]
// describes day today - k as visible today; days before the start of the
// simulation carry day < 0 and no information.
struct Observables {
  Day today = 0;
  ReportedProfile profile;
  std::array<HealthStatus, kWindowDays> statuses;
  std::vector<Cluster> clusters;
};

Observables BuildObservables(const World& world, AgentId id, Day today,
                             std::vector<Cluster> clusters);

}  // namespace pct

#endif  // PCT_TRACING_OBSERVABLES_H_
