#include "pct/epi/world.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "pct/common/check.h"
#include "pct/epi/disease.h"

namespace pct {
namespace {

// Sub-stream tags below Stream::kWorld.
constexpr uint64_t kDailyStream = 0;
constexpr uint64_t kInfectionStream = 1;

// Share of agents reporting sex "other"; the rest split evenly.
constexpr double kOtherSexShare = 0.02;
// Base prevalence of each pre-existing condition, scaled up with age.
constexpr std::array<double, kNumConditions> kConditionPrevalence = {
    0.15, 0.08, 0.06, 0.05, 0.2, 0.03, 0.2, 0.03};

int Poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

uint64_t PairKey(AgentId a, AgentId b) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

World::World(const WorldConfig& config, const ScenarioParams& params, uint64_t seed)
    : config_(config),
      params_(params),
      rng_(MakeRng(seed, Stream::kWorld, {kDailyStream})),
      disease_rng_(MakeRng(seed, Stream::kWorld, {kInfectionStream})) {}

absl::StatusOr<World> World::Create(const WorldConfig& config, const ScenarioParams& params,
                                    uint64_t seed) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  World world(config, params, seed);
  world.BuildPopulation(seed);
  return world;
}

void World::BuildPopulation(uint64_t seed) {
  const int n = config_.num_agents;
  Rng rng = MakeRng(seed, Stream::kPopulation);

  household_of_.assign(n, 0);
  for (AgentId next = 0; next < n;) {
    const int size = UniformInt(rng, config_.household_min, config_.household_max);
    std::vector<AgentId> members;
    for (int k = 0; k < size && next < n; ++k, ++next) {
      household_of_[next] = static_cast<int>(households_.size());
      members.push_back(next);
    }
    households_.push_back(std::move(members));
  }

  // App ownership: smartphone owners first, then installation among owners
  // so that has_app implies smartphone_owner.
  const double share = SmartphoneShare();
  double install_prob = params_.adoption_rate;
  if (!params_.adoption_is_uptake) install_prob = std::min(1.0, params_.adoption_rate / share);

  profiles_.resize(n);
  for (AgentProfile& p : profiles_) {
    p.age = UniformInt(rng, 0, 90);
    const double u = Uniform(rng, 0.0, 1.0);
    p.sex = u < kOtherSexShare                        ? Sex::kOther
            : u < kOtherSexShare + (1 - kOtherSexShare) / 2 ? Sex::kFemale
                                                            : Sex::kMale;
    const double age_scale = 0.5 + p.age / 60.0;
    for (int c = 0; c < kNumConditions; ++c) {
      if (Bernoulli(rng, kConditionPrevalence[c] * age_scale)) p.conditions.set(c);
    }
    p.carefulness = Uniform(rng, params_.carefulness_lo, params_.carefulness_hi);
    if (params_.carefulness_lo == params_.carefulness_hi) p.carefulness = params_.carefulness_lo;
    p.smartphone_owner = Bernoulli(rng, share);
    p.has_app = p.smartphone_owner && Bernoulli(rng, install_prob);
  }

  disease_.assign(n, DiseaseState{});
  recommended_.assign(n, 1);
  recommended_today_.assign(n, 1);
  effective_level_.assign(n, 1);
  test_quarantine_until_.assign(n, kNoDay);
  household_quarantine_until_.assign(n, kNoDay);
  known_positive_.assign(n, 0);
  pending_test_day_.assign(n, kNoDay);
  statuses_.assign(n, {});

  const int seeds = static_cast<int>(std::lround(params_.init_exposed_frac * n));
  std::vector<AgentId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int k = 0; k < seeds; ++k) {
    Infect(order[k], 0, -1);
    initial_exposed_.push_back(order[k]);
  }
  std::sort(initial_exposed_.begin(), initial_exposed_.end());
}

void World::Infect(AgentId id, Day day, AgentId infector) {
  disease_[id] = SampleInfection(config_.disease, day, disease_rng_);
  if (infector >= 0) infections_.push_back({infector, id, day});
}

void World::ExposeForTesting(AgentId id) {
  Infect(id, day_, -1);
  initial_exposed_.push_back(id);
}

double World::GroundTruthInfectiousness(AgentId id, Day day) const {
  PCT_CHECK(day <= day_, "ground truth requested for a future day");
  const DiseaseState& s = disease_[id];
  if (!s.infected() || day < s.day_exposed) return 0.0;
  return s.CurveAt(day - s.day_exposed);
}

HealthStatus World::StatusOn(AgentId id, Day day) const {
  const auto& history = statuses_[id];
  if (day < 0 || day >= static_cast<Day>(history.size())) {
    HealthStatus empty;
    empty.day = day;
    return empty;
  }
  return history[day];
}

absl::Status World::SetRecommendation(AgentId id, int level) {
  if (id < 0 || id >= num_agents()) {
    return absl::OutOfRangeError(absl::StrCat("agent ", id, " does not exist"));
  }
  if (level < 0 || level >= kNumBehaviorLevels) {
    return absl::InvalidArgumentError(
        absl::StrCat("behavior level ", level, " outside 0..", kNumBehaviorLevels - 1));
  }
  recommended_[id] = level;
  return absl::OkStatus();
}

std::array<int, 4> World::CompartmentCounts() const {
  std::array<int, 4> counts{};
  for (const DiseaseState& s : disease_) ++counts[static_cast<int>(s.compartment)];
  return counts;
}

void World::ProgressDisease(Day d) {
  for (DiseaseState& s : disease_) {
    if (s.infected()) s.compartment = CompartmentOn(s, d);
  }
}

int World::RecommendedLevel(AgentId id, Day d) const {
  if (config_.force_level >= 0) return config_.force_level;
  int level = profiles_[id].has_app ? recommended_[id] : 1;
  if (test_quarantine_until_[id] >= d || household_quarantine_until_[id] >= d) {
    level = kQuarantineLevel;
  }
  return level;
}

void World::ChooseLevels(Day d, DayReport& report) {
  for (AgentId id = 0; id < num_agents(); ++id) {
    const int recommended = RecommendedLevel(id, d);
    recommended_today_[id] = recommended;
    ++report.level_counts[recommended];
    const Compartment c = disease_[id].compartment;
    if (recommended == kQuarantineLevel &&
        (c == Compartment::kSusceptible || c == Compartment::kRecovered)) {
      ++report.false_quarantined;
    }

    // Compliance. The draws happen for every agent so that the stream
    // position does not depend on the recommendations.
    const bool drop_all = Bernoulli(rng_, params_.all_levels_dropout);
    const bool drop_test = Bernoulli(rng_, params_.quarantine_dropout_test);
    const bool drop_household = Bernoulli(rng_, params_.quarantine_dropout_household);
    if (config_.force_level >= 0) {
      effective_level_[id] = drop_all ? 0 : recommended;
      continue;
    }
    int level = profiles_[id].has_app ? recommended_[id] : 1;
    const bool test_q = test_quarantine_until_[id] >= d && !drop_test;
    const bool household_q = household_quarantine_until_[id] >= d && !drop_household;
    if (test_q || household_q) level = kQuarantineLevel;
    if (drop_all) level = 0;
    effective_level_[id] = level;
  }
}

void World::GenerateContacts(Day d, DayReport& report) {
  const int n = num_agents();
  std::vector<ContactEvent>& out = report.contacts;

  for (const std::vector<AgentId>& members : households_) {
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        const int count = 1 + Poisson(rng_, config_.household_extra_encounters);
        out.push_back({d, members[i], members[j], count, true});
      }
    }
  }

  // Out-of-household encounters: a configuration-model pairing of stubs.
  std::vector<AgentId> stubs;
  for (AgentId id = 0; id < n; ++id) {
    const double mult = config_.behavior.level_multipliers[effective_level_[id]];
    const int k = Poisson(rng_, config_.base_contact_rate * params_.mobility_factor * mult);
    stubs.insert(stubs.end(), k, id);
  }
  std::shuffle(stubs.begin(), stubs.end(), rng_);
  std::vector<std::pair<uint64_t, int>> pairs;
  pairs.reserve(stubs.size() / 2);
  for (size_t s = 0; s + 1 < stubs.size(); s += 2) {
    AgentId a = stubs[s];
    AgentId b = stubs[s + 1];
    if (a == b || household_of_[a] == household_of_[b]) continue;
    if (a > b) std::swap(a, b);
    pairs.push_back({PairKey(a, b), 1});
  }
  std::sort(pairs.begin(), pairs.end());
  for (size_t i = 0; i < pairs.size();) {
    size_t j = i;
    int count = 0;
    while (j < pairs.size() && pairs[j].first == pairs[i].first) count += pairs[j++].second;
    const auto a = static_cast<AgentId>(pairs[i].first >> 32);
    const auto b = static_cast<AgentId>(pairs[i].first & 0xffffffffu);
    out.push_back({d, a, b, count, false});
    i = j;
  }
  report.contacts_per_agent = n > 0 ? 2.0 * static_cast<double>(out.size()) / n : 0.0;
}

void World::Transmit(Day d, DayReport& report) {
  auto try_infect = [&](AgentId src, AgentId dst, int count) {
    const DiseaseState& s = disease_[src];
    if (!s.infected() || disease_[dst].infected()) return;
    const double inf = s.CurveAt(d - s.day_exposed);
    if (inf <= 0.0) return;
    const double careful =
        config_.carefulness_affects_transmission ? profiles_[dst].carefulness : 0.0;
    for (int k = 0; k < count; ++k) {
      if (DrawTransmission(inf, careful, params_, rng_)) {
        Infect(dst, d, src);
        report.infections.push_back({src, dst, d});
        return;
      }
    }
  };
  for (const ContactEvent& e : report.contacts) {
    try_infect(e.agent_a, e.agent_b, e.count);
    try_infect(e.agent_b, e.agent_a, e.count);
  }
}

void World::ReportSymptoms(Day d) {
  for (AgentId id = 0; id < num_agents(); ++id) {
    const DiseaseState& s = disease_[id];
    const bool symptomatic = s.infected() && !s.is_asymptomatic && d >= s.symptom_onset_day &&
                             d < s.RecoveryDay();
    double dropout = params_.symptom_dropout;
    if (config_.carefulness_affects_reporting) {
      dropout *= 1.0 - config_.reporting_damping * profiles_[id].carefulness;
    }
    HealthStatus status;
    status.day = d;
    for (int k = 0; k < kNumSymptoms; ++k) {
      const double u = Uniform(rng_, 0.0, 1.0);
      if (symptomatic && s.true_symptoms.test(k)) {
        if (u >= dropout) status.reported_symptoms.set(k);
      } else if (u < params_.symptom_dropin) {
        status.reported_symptoms.set(k);
      }
    }
    statuses_[id].push_back(status);
  }
}

void World::DeliverResults(Day d, DayReport& report) {
  for (AgentId id = 0; id < num_agents(); ++id) {
    const Day test_day = pending_test_day_[id];
    if (test_day == kNoDay) continue;
    HealthStatus& status = statuses_[id][test_day];
    if (status.test_result_day != d) continue;
    pending_test_day_[id] = kNoDay;
    const bool positive = status.test_result == TestResult::kPendingPositive;
    if (log_ != nullptr) {
      log_->Record(d, "test_result", Json{{"agent", id}, {"positive", positive}});
    }
    if (!positive) continue;
    known_positive_[id] = 1;
    report.positive_results.push_back(id);
    const Day until = d + config_.quarantine_days;
    test_quarantine_until_[id] = std::max(test_quarantine_until_[id], until);
    for (AgentId member : households_[household_of_[id]]) {
      if (member == id) continue;
      household_quarantine_until_[member] = std::max(household_quarantine_until_[member], until);
    }
  }
}

void World::SeekTests(Day d) {
  const TestingConfig& t = config_.testing;
  for (AgentId id = 0; id < num_agents(); ++id) {
    const AgentProfile& p = profiles_[id];
    HealthStatus& status = statuses_[id][d];
    if (!p.has_app || known_positive_[id] || pending_test_day_[id] != kNoDay ||
        status.reported_symptoms.none()) {
      continue;
    }
    if (!Bernoulli(rng_, t.seek_rate * p.carefulness)) continue;
    const Compartment c = disease_[id].compartment;
    const bool carrier = c == Compartment::kExposed || c == Compartment::kInfectious;
    const bool positive = carrier && !Bernoulli(rng_, t.false_negative_rate);
    status.test_result = positive ? TestResult::kPendingPositive : TestResult::kPendingNegative;
    status.test_result_day = d + t.result_delay_days;
    pending_test_day_[id] = d;
    if (log_ != nullptr) {
      log_->Record(d, "test", Json{{"agent", id}, {"result_day", status.test_result_day}});
    }
  }
}

DayReport World::StepDay() {
  const Day d = day_;
  PCT_CHECK(d < config_.horizon_days, "stepping past the configured horizon");
  DayReport report;
  report.day = d;

  if (d == 0 && log_ != nullptr) {
    log_->Record(d, "initial_exposed", Json{{"agents", initial_exposed_}});
  }

  ProgressDisease(d);
  ChooseLevels(d, report);
  GenerateContacts(d, report);
  Transmit(d, report);
  ReportSymptoms(d);
  // Results due today are delivered before new tests are sampled, so a
  // zero-day delay still reaches the agent on the day of the test.
  DeliverResults(d, report);
  SeekTests(d);
  DeliverResults(d, report);

  report.compartment_counts = CompartmentCounts();
  if (log_ != nullptr) {
    if (config_.log_contacts) {
      for (const ContactEvent& e : report.contacts) {
        log_->Record(d, "contact", Json{{"a", e.agent_a},
                                        {"b", e.agent_b},
                                        {"count", e.count},
                                        {"household", e.household}});
      }
    }
    for (const InfectionEdge& e : report.infections) {
      log_->Record(d, "infection", Json{{"infector", e.infector}, {"infectee", e.infectee}});
    }
    const auto& c = report.compartment_counts;
    log_->Record(d, "day_summary",
                 Json{{"S", c[0]},
                      {"E", c[1]},
                      {"I", c[2]},
                      {"R", c[3]},
                      {"contacts", report.contacts.size()},
                      {"contacts_per_agent", report.contacts_per_agent},
                      {"new_infections", report.infections.size()},
                      {"level_counts", report.level_counts},
                      {"false_quarantined", report.false_quarantined}});
  }
  ++day_;
  return report;
}

}  // namespace pct
