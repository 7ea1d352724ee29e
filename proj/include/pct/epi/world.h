#ifndef PCT_EPI_WORLD_H_
#define PCT_EPI_WORLD_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/rng.h"
#include "pct/epi/config.h"
#include "pct/epi/event_log.h"
#include "pct/epi/scenario.h"
#include "pct/epi/types.h"

namespace pct {

// What happened on one simulated day.
struct DayReport {
  Day day = 0;
  std::vector<ContactEvent> contacts;
  std::vector<InfectionEdge> infections;
  // Agents whose positive test result became visible today.
  std::vector<AgentId> positive_results;
  std::array<int, 4> compartment_counts{};
  // Levels recommended to agents today (before compliance dropouts).
  std::array<int, kNumBehaviorLevels> level_counts{};
  // Agents recommended level 3 while Susceptible or Recovered.
  int false_quarantined = 0;
  // Contact events per agent (each event counts for both parties).
  double contacts_per_agent = 0.0;
};

// Discrete-time agent-based SEIR world: households, random encounters shaped
// by behavior levels, triangular infectiousness curves, symptom reporting
// and testing. Tracing layers sit on top and only talk to the world through
// SetRecommendation() and the read accessors.
class World {
 public:
  static absl::StatusOr<World> Create(const WorldConfig& config,
                                      const ScenarioParams& params, uint64_t seed);

  // Simulates day `day()` and advances the day index.
  DayReport StepDay();

  // Index of the next day to simulate.
  Day day() const { return day_; }
  int num_agents() const { return static_cast<int>(profiles_.size()); }
  const WorldConfig& config() const { return config_; }
  const ScenarioParams& params() const { return params_; }

  const AgentProfile& profile(AgentId id) const { return profiles_[id]; }
  const DiseaseState& disease(AgentId id) const { return disease_[id]; }
  Compartment compartment(AgentId id) const { return disease_[id].compartment; }
  int household(AgentId id) const { return household_of_[id]; }
  std::span<const AgentId> household_members(int household) const {
    return households_[household];
  }
  int num_households() const { return static_cast<int>(households_.size()); }

  // Infectiousness of `id` on `day` read off its curve; `day` must not be
  // in the future.
  double GroundTruthInfectiousness(AgentId id, Day day) const;

  // Self-reported status for `day` as stored by the simulator (pending
  // results included). Days without a record return an empty status.
  HealthStatus StatusOn(AgentId id, Day day) const;

  // App recommendation for the following days; level in 0..3. Non-app
  // agents always follow level 1.
  absl::Status SetRecommendation(AgentId id, int level);
  int recommendation(AgentId id) const { return recommended_[id]; }
  // Last day of an active test-triggered or household quarantine.
  Day test_quarantine_until(AgentId id) const { return test_quarantine_until_[id]; }
  Day household_quarantine_until(AgentId id) const { return household_quarantine_until_[id]; }
  // Behavior level actually followed on the last simulated day.
  int effective_level(AgentId id) const { return effective_level_[id]; }

  const std::vector<InfectionEdge>& infections() const { return infections_; }
  const std::vector<AgentId>& initial_exposed() const { return initial_exposed_; }
  std::array<int, 4> CompartmentCounts() const;

  void set_event_log(EventLog* log) { log_ = log; }

  // Test hook: infects `id` on the current day regardless of contacts.
  void ExposeForTesting(AgentId id);

 private:
  World(const WorldConfig& config, const ScenarioParams& params, uint64_t seed);

  void BuildPopulation(uint64_t seed);
  void Infect(AgentId id, Day day, AgentId infector);
  void ProgressDisease(Day d);
  int RecommendedLevel(AgentId id, Day d) const;
  void ChooseLevels(Day d, DayReport& report);
  void GenerateContacts(Day d, DayReport& report);
  void Transmit(Day d, DayReport& report);
  void ReportSymptoms(Day d);
  void DeliverResults(Day d, DayReport& report);
  void SeekTests(Day d);

  WorldConfig config_;
  ScenarioParams params_;
  Rng rng_;
  Rng disease_rng_;

  std::vector<AgentProfile> profiles_;
  std::vector<int> household_of_;
  std::vector<std::vector<AgentId>> households_;
  std::vector<DiseaseState> disease_;
  std::vector<int> recommended_;
  std::vector<int> recommended_today_;
  std::vector<int> effective_level_;
  std::vector<Day> test_quarantine_until_;
  std::vector<Day> household_quarantine_until_;
  std::vector<uint8_t> known_positive_;
  std::vector<Day> pending_test_day_;
  std::vector<std::vector<HealthStatus>> statuses_;
  std::vector<InfectionEdge> infections_;
  std::vector<AgentId> initial_exposed_;
  Day day_ = 0;
  EventLog* log_ = nullptr;
};

}  // namespace pct

#endif  // PCT_EPI_WORLD_H_
