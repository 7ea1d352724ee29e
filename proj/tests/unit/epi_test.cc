#include <algorithm>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "pct/common/rng.h"
#include "pct/epi/config.h"
#include "pct/epi/disease.h"
#include "pct/epi/event_log.h"
#include "pct/epi/scenario.h"
#include "pct/epi/world.h"

namespace pct {
namespace {

World MakeWorld(const WorldConfig& config, const ScenarioParams& params, uint64_t seed) {
  absl::StatusOr<World> w = World::Create(config, params, seed);
  EXPECT_TRUE(w.ok()) << w.status();
  return *std::move(w);
}

TEST(DrawTransmission, ZeroInfectiousnessNeverTransmits) {
  ScenarioParams p;
  p.transmission_scale = 1.0;
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_FALSE(DrawTransmission(0.0, 0.3, p, rng));
}

TEST(DrawTransmission, CertainWhenScaleOneAndNoDamping) {
  ScenarioParams p;
  p.transmission_scale = 1.0;
  p.carefulness_damping = 0.0;
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) EXPECT_TRUE(DrawTransmission(1.0, 0.9, p, rng));
}

TEST(DrawTransmission, MonteCarloRateMatchesClosedForm) {
  ScenarioParams p;
  p.transmission_scale = 0.5;
  p.carefulness_damping = 0.5;
  const double expected = 0.5 * 0.6 * (1.0 - 0.5 * 0.8);
  EXPECT_NEAR(TransmissionProbability(0.6, 0.8, p), expected, 1e-12);
  Rng rng(3);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += DrawTransmission(0.6, 0.8, p, rng);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.18, 0.01);
}

TEST(DrawTransmission, ProbabilityIsClamped) {
  ScenarioParams p;
  p.transmission_scale = 5.0;
  p.carefulness_damping = 0.0;
  EXPECT_DOUBLE_EQ(TransmissionProbability(1.0, 0.0, p), 1.0);
  p.carefulness_damping = 3.0;
  EXPECT_DOUBLE_EQ(TransmissionProbability(1.0, 1.0, p), 0.0);
}

TEST(Curve, TriangularShape) {
  const std::vector<double> curve = MakeTriangularCurve(2, 6, 8, 0.8);
  ASSERT_EQ(curve.size(), 14u);
  EXPECT_EQ(curve[0], 0.0);
  EXPECT_EQ(curve[1], 0.0);
  EXPECT_DOUBLE_EQ(curve[6], 0.8);
  for (int k = 2; k < 6; ++k) EXPECT_LT(curve[k], curve[k + 1]);
  for (int k = 6; k + 1 < 14; ++k) EXPECT_GT(curve[k], curve[k + 1]);
  for (double v : curve) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 0.8);
  }
}

TEST(GroundTruth, SusceptibleIsZeroAndExposureDayIsZero) {
  WorldConfig config;
  config.num_agents = 50;
  ScenarioParams params;
  params.init_exposed_frac = 0.0;
  params.transmission_scale = 0.0;
  World world = MakeWorld(config, params, 7);
  for (int d = 0; d < 3; ++d) world.StepDay();
  EXPECT_EQ(world.GroundTruthInfectiousness(0, 2), 0.0);
  world.ExposeForTesting(0);
  EXPECT_EQ(world.disease(0).day_exposed, 3);
  EXPECT_EQ(world.GroundTruthInfectiousness(0, 3), 0.0);
  EXPECT_EQ(world.GroundTruthInfectiousness(1, 3), 0.0);
}

TEST(GroundTruth, ReadsTheAgentCurve) {
  WorldConfig config;
  config.num_agents = 20;
  ScenarioParams params;
  params.init_exposed_frac = 0.0;
  params.transmission_scale = 0.0;
  World world = MakeWorld(config, params, 11);
  world.ExposeForTesting(4);
  const DiseaseState& s = world.disease(4);
  const std::vector<double> expected = MakeTriangularCurve(
      s.latent_days, s.incubation_days, s.recovery_tail_days,
      *std::max_element(s.infectiousness_curve.begin(), s.infectiousness_curve.end()));
  ASSERT_EQ(expected.size(), s.infectiousness_curve.size());
  for (size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(s.infectiousness_curve[k], expected[k], 1e-12);
    world.StepDay();
    EXPECT_DOUBLE_EQ(world.GroundTruthInfectiousness(4, static_cast<Day>(k)),
                     s.infectiousness_curve[k]);
  }
}

TEST(GroundTruthDeathTest, FutureDayIsAContractViolation) {
  WorldConfig config;
  config.num_agents = 5;
  World world = MakeWorld(config, ScenarioParams{}, 1);
  EXPECT_DEATH(world.GroundTruthInfectiousness(0, 5), "future");
}

TEST(World, ZeroAgentsRejectedAtConstruction) {
  WorldConfig config;
  config.num_agents = 0;
  EXPECT_FALSE(World::Create(config, ScenarioParams{}, 1).ok());
}

TEST(World, ZeroTransmissionKeepsInitialExposed) {
  WorldConfig config;
  config.num_agents = 100;
  ScenarioParams params;
  params.init_exposed_frac = 0.05;
  params.transmission_scale = 0.0;
  World world = MakeWorld(config, params, 5);
  ASSERT_EQ(world.initial_exposed().size(), 5u);
  for (int d = 0; d < 40; ++d) {
    DayReport r = world.StepDay();
    EXPECT_TRUE(r.infections.empty());
    const auto& c = r.compartment_counts;
    EXPECT_EQ(c[1] + c[2] + c[3], 5);
  }
  EXPECT_TRUE(world.infections().empty());
}

TEST(World, SingleAgentHasNoContactsAndProgressesOnSchedule) {
  WorldConfig config;
  config.num_agents = 1;
  ScenarioParams params;
  params.init_exposed_frac = 1.0;
  World world = MakeWorld(config, params, 3);
  ASSERT_EQ(world.initial_exposed().size(), 1u);
  const DiseaseState s = world.disease(0);
  const Day recovery = s.RecoveryDay();
  for (Day d = 0; d <= recovery + 1; ++d) {
    DayReport r = world.StepDay();
    EXPECT_TRUE(r.contacts.empty());
    EXPECT_EQ(world.compartment(0), CompartmentOn(s, d));
  }
  EXPECT_EQ(CompartmentOn(s, s.day_exposed), Compartment::kExposed);
  EXPECT_EQ(CompartmentOn(s, s.day_exposed + s.latent_days), Compartment::kInfectious);
  EXPECT_EQ(CompartmentOn(s, recovery), Compartment::kRecovered);
  EXPECT_EQ(world.compartment(0), Compartment::kRecovered);
}

double MeanContacts(double mobility, int force_level, uint64_t seed) {
  WorldConfig config;
  config.num_agents = 1000;
  config.force_level = force_level;
  ScenarioParams params;
  params.mobility_factor = mobility;
  World world = MakeWorld(config, params, seed);
  double sum = 0.0;
  for (int d = 0; d < 30; ++d) sum += world.StepDay().contacts_per_agent;
  return sum / 30;
}

TEST(World, MoreMobilityMeansMoreContacts) {
  EXPECT_GT(MeanContacts(0.9, -1, 21), MeanContacts(0.3, -1, 21));
}

TEST(World, LevelZeroHasAtLeastLevelOneContacts) {
  EXPECT_GE(MeanContacts(0.6, 0, 22), MeanContacts(0.6, 1, 22));
}

TEST(World, QuarantineLevelLeavesOnlyHouseholdContacts) {
  WorldConfig config;
  config.num_agents = 500;
  config.force_level = kQuarantineLevel;
  ScenarioParams params;
  params.all_levels_dropout = 0.0;
  params.quarantine_dropout_test = 0.0;
  params.quarantine_dropout_household = 0.0;
  params.init_exposed_frac = 0.02;
  params.transmission_scale = 0.5;
  World world = MakeWorld(config, params, 9);
  for (int d = 0; d < 20; ++d) {
    DayReport r = world.StepDay();
    EXPECT_EQ(r.level_counts[kQuarantineLevel], 500);
    for (const ContactEvent& e : r.contacts) {
      EXPECT_TRUE(e.household);
      EXPECT_EQ(world.household(e.agent_a), world.household(e.agent_b));
    }
  }
  for (const InfectionEdge& e : world.infections()) {
    EXPECT_EQ(world.household(e.infector), world.household(e.infectee));
  }
}

TEST(World, RejectsOutOfRangeRecommendation) {
  WorldConfig config;
  config.num_agents = 10;
  World world = MakeWorld(config, ScenarioParams{}, 1);
  EXPECT_FALSE(world.SetRecommendation(0, 4).ok());
  EXPECT_FALSE(world.SetRecommendation(0, -1).ok());
  EXPECT_FALSE(MobilityMultiplier(BehaviorConfig{}, 7).ok());
  EXPECT_DOUBLE_EQ(*MobilityMultiplier(BehaviorConfig{}, 1), 1.0);
  EXPECT_DOUBLE_EQ(*MobilityMultiplier(BehaviorConfig{}, 3), 0.0);
}

std::string RunLogged(uint64_t seed) {
  WorldConfig config;
  config.num_agents = 300;
  config.log_contacts = true;
  ScenarioParams params;
  params.init_exposed_frac = 0.03;
  std::ostringstream out;
  EventLog log(&out);
  World world = MakeWorld(config, params, seed);
  world.set_event_log(&log);
  for (int d = 0; d < 30; ++d) world.StepDay();
  return out.str();
}

TEST(World, IdenticalSeedsGiveIdenticalEventLogs) {
  const std::string a = RunLogged(42);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, RunLogged(42));
  EXPECT_NE(a, RunLogged(43));
}

TEST(World, ConservationMonotonicityAndSupport) {
  WorldConfig config;
  config.num_agents = 800;
  ScenarioParams params;
  params.init_exposed_frac = 0.01;
  params.transmission_scale = 0.15;
  World world = MakeWorld(config, params, 17);
  std::vector<Compartment> prev(800, Compartment::kSusceptible);
  std::set<AgentId> infected;
  for (int d = 0; d < 50; ++d) {
    DayReport r = world.StepDay();
    const auto& c = r.compartment_counts;
    EXPECT_EQ(c[0] + c[1] + c[2] + c[3], 800);
    for (const ContactEvent& e : r.contacts) {
      EXPECT_NE(e.agent_a, e.agent_b);
      EXPECT_GE(e.count, 1);
    }
    for (AgentId a = 0; a < 800; ++a) {
      EXPECT_GE(static_cast<int>(world.compartment(a)), static_cast<int>(prev[a]));
      prev[a] = world.compartment(a);
      if (world.GroundTruthInfectiousness(a, d) > 0.0) {
        const Compartment on = CompartmentOn(world.disease(a), d);
        EXPECT_TRUE(on == Compartment::kExposed || on == Compartment::kInfectious);
      }
    }
    for (const InfectionEdge& e : r.infections) EXPECT_TRUE(infected.insert(e.infectee).second);
  }
}

TEST(World, AsymptomaticFractionNearConfigured) {
  DiseaseConfig config;
  Rng rng(5);
  int asymptomatic = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) asymptomatic += SampleInfection(config, 0, rng).is_asymptomatic;
  const double frac = static_cast<double>(asymptomatic) / n;
  EXPECT_GE(frac, 0.20);
  EXPECT_LE(frac, 0.30);
}

TEST(World, PositiveResultQuarantinesForFourteenDays) {
  WorldConfig config;
  config.num_agents = 1000;
  ScenarioParams params;
  params.adoption_rate = 0.7;
  params.init_exposed_frac = 0.03;
  World world = MakeWorld(config, params, 31);
  bool seen = false;
  for (int d = 0; d < 50 && !seen; ++d) {
    DayReport r = world.StepDay();
    for (AgentId a : r.positive_results) {
      seen = true;
      EXPECT_EQ(world.test_quarantine_until(a), d + config.quarantine_days);
      for (AgentId m : world.household_members(world.household(a))) {
        if (m == a) continue;
        EXPECT_GE(world.household_quarantine_until(m), d + config.quarantine_days);
      }
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Scenario, AdoptionTableInterpolation) {
  EXPECT_NEAR(*UptakeForPopulation(0.6), 0.8415, 1e-12);
  EXPECT_NEAR(*UptakeForPopulation(0.5), (0.5618 + 0.8415) / 2, 1e-12);
  EXPECT_NEAR(PopulationForUptake(0.8415), 0.6, 1e-12);
  EXPECT_FALSE(UptakeForPopulation(0.75).ok());
  ScenarioParams p;
  p.adoption_rate = 0.8;
  EXPECT_FALSE(p.Validate().ok());
}

TEST(Scenario, JsonRoundTripAndUnknownKey) {
  ScenarioParams p;
  p.mobility_factor = 0.77;
  p.seed = 99;
  absl::StatusOr<ScenarioParams> back = ScenarioFromJson(ScenarioToJson(p), "scenario");
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_DOUBLE_EQ(back->mobility_factor, 0.77);
  EXPECT_EQ(back->seed, 99u);
  Json j = ScenarioToJson(p);
  j["mobilty_factor"] = 1.0;
  absl::StatusOr<ScenarioParams> bad = ScenarioFromJson(j, "scenario");
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(bad.status().message().find("mobilty_factor"), std::string::npos);
}

}  // namespace
}  // namespace pct
