#include <cmath>
#include <limits>
#include <map>

#include "gtest/gtest.h"
#include "pct/common/rng.h"
#include "pct/tracing/messages.h"
#include "pct/tracing/network.h"
#include "pct/tracing/risk.h"

namespace pct {
namespace {

TEST(Quantize, Examples) {
  const RiskBinTable t = RiskBinTable::Uniform();
  EXPECT_EQ(*t.Quantize(0.0), 0);
  EXPECT_EQ(*t.Quantize(15.0 / 16), 15);
  EXPECT_EQ(*t.Quantize(3.7), 15);
  EXPECT_EQ(*t.Quantize(0.40), static_cast<int>(std::floor(0.40 * 16)));
  EXPECT_FALSE(t.Quantize(std::numeric_limits<double>::quiet_NaN()).ok());
}

TEST(Quantize, MonotoneOnRandomPairs) {
  Rng rng(4);
  const RiskBinTable t = RiskBinTable::Uniform();
  for (int i = 0; i < 20000; ++i) {
    double a = Uniform(rng, 0.0, 1.2);
    double b = Uniform(rng, 0.0, 1.2);
    if (a > b) std::swap(a, b);
    EXPECT_LE(t.Level(a), t.Level(b));
  }
}

TEST(RiskBinTable, RejectsNonIncreasingThresholds) {
  RiskBinTable::Thresholds th = RiskBinTable::Uniform().thresholds();
  th[4] = th[3];
  EXPECT_FALSE(RiskBinTable::Create(th).ok());
  th = RiskBinTable::Uniform().thresholds();
  th[0] = 0.0;
  EXPECT_FALSE(RiskBinTable::Create(th).ok());
}

TEST(RiskBinTable, JsonRoundTripIsBitExact) {
  Rng rng(8);
  std::vector<double> risks(5000);
  for (double& r : risks) r = std::pow(Uniform(rng, 0.0, 1.0), 3.0);
  const RiskBinTable t = *FitBins(risks);
  const std::string text = RiskBinTableToJson(t).dump();
  absl::StatusOr<RiskBinTable> back = RiskBinTableFromJson(Json::parse(text));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->thresholds(), t.thresholds());
}

TEST(FitBins, UniformRisksGiveEqualMassOnHeldOutSample) {
  Rng rng(12);
  std::vector<double> fit(100000), held(100000);
  for (double& r : fit) r = Uniform(rng, 0.0, 1.0);
  for (double& r : held) r = Uniform(rng, 0.0, 1.0);
  absl::StatusOr<RiskBinTable> t = FitBins(fit);
  ASSERT_TRUE(t.ok()) << t.status();
  for (double mass : BinMasses(*t, held)) EXPECT_NEAR(mass, 0.0625, 0.005);
}

TEST(FitBins, DegenerateInputsAreErrors) {
  EXPECT_FALSE(FitBins(std::vector<double>(1000, 0.3)).ok());
  std::vector<double> fifteen;
  for (int k = 0; k < 15; ++k) fifteen.push_back(0.01 * (k + 1));
  EXPECT_FALSE(FitBins(fifteen).ok());
}

TEST(FitBins, SixteenAtomsLandOnePerBin) {
  std::vector<double> risks;
  for (int k = 1; k <= 16; ++k) risks.insert(risks.end(), 1000, 0.01 * k);
  absl::StatusOr<RiskBinTable> t = FitBins(risks);
  ASSERT_TRUE(t.ok()) << t.status();
  for (int k = 1; k <= 16; ++k) EXPECT_EQ(t->Level(0.01 * k), k - 1) << "atom " << k;
}

std::array<double, kWindowDays> Flat(double v) {
  std::array<double, kWindowDays> a;
  a.fill(v);
  return a;
}

TEST(UpdateMessages, UnchangedHistoryIsSilent) {
  ContactLog log;
  for (Day d = 0; d <= 20; ++d) log.Record(d, 100 + d, 2);
  const RiskBinTable bins = RiskBinTable::Uniform();
  const auto h = Flat(0.3);
  EXPECT_TRUE(BuildUpdateMessages(log, 20, h, h, bins).empty());
  auto nudged = h;
  nudged[3] = 0.3 + 0.01;
  EXPECT_EQ(bins.Level(0.3), bins.Level(0.31));
  EXPECT_TRUE(BuildUpdateMessages(log, 20, h, nudged, bins).empty());
}

TEST(UpdateMessages, PositiveTestJumpReachesEveryContactOfChangedDays) {
  const Day now = 30;
  ContactLog log;
  log.Record(now - 1, 1, 1);
  log.Record(now - 1, 2, 1);
  log.Record(now - 1, 3, 1);
  log.Record(now - 5, 4, 2);
  const RiskBinTable bins = RiskBinTable::Uniform();
  const auto prev = Flat(0.02);
  auto next = prev;
  for (int k = 0; k <= 2; ++k) next[k] = 0.9;
  const std::vector<RiskMessage> msgs = BuildUpdateMessages(log, now, prev, next, bins);
  ASSERT_EQ(msgs.size(), 3u);
  for (const RiskMessage& m : msgs) {
    EXPECT_EQ(m.kind, MessageKind::kUpdate);
    EXPECT_EQ(m.encounter_day, now - 1);
    EXPECT_EQ(m.old_level, bins.Level(0.02));
    EXPECT_EQ(m.new_level, bins.Level(0.9));
    EXPECT_EQ(m.transport_day, now);
  }
  next[5] = 0.5;
  EXPECT_EQ(BuildUpdateMessages(log, now, prev, next, bins).size(), 5u);
}

RiskMessage Encounter(Day day, RiskLevel level, Day transport) {
  return {MessageKind::kEncounter, day, level, kNoRiskLevel, transport, 0};
}

RiskMessage Update(Day day, RiskLevel old_level, RiskLevel new_level, Day transport) {
  return {MessageKind::kUpdate, day, new_level, old_level, transport, 0};
}

TEST(ClusterWindow, GroupingExamples) {
  const Day now = 10;
  ClusterWindow w;
  for (int i = 0; i < 5; ++i) w.Apply(Encounter(now, 4, now), now);
  EXPECT_EQ(w.Clusters(now), (std::vector<Cluster>{{0, 4, 5}}));

  ClusterWindow v;
  v.Apply(Encounter(now - 1, 3, now), now);
  v.Apply(Encounter(now - 1, 3, now), now);
  v.Apply(Encounter(now - 1, 7, now), now);
  EXPECT_EQ(v.Clusters(now), (std::vector<Cluster>{{1, 3, 2}, {1, 7, 1}}));
}

TEST(ClusterWindow, UpdateMovesOneCount) {
  const Day now = 10;
  std::vector<RiskMessage> log(3, Encounter(now - 2, 4, now - 2));
  log.push_back(Update(now - 2, 4, 9, now));
  ClusterWindow w;
  for (const RiskMessage& m : log) w.Apply(m, now);
  const std::vector<Cluster> expected = {{2, 4, 2}, {2, 9, 1}};
  EXPECT_EQ(w.Clusters(now), expected);
  EXPECT_EQ(ReplayClusters(log, now), expected);
  EXPECT_EQ(w.anomalies(), 0);
}

TEST(ClusterWindow, UpdateForAbsentClusterIsAnomaly) {
  const Day now = 10;
  ClusterWindow w;
  w.Apply(Update(now - 3, 6, 11, now), now);
  EXPECT_EQ(w.Clusters(now), (std::vector<Cluster>{{3, 11, 1}}));
  EXPECT_EQ(w.anomalies(), 1);
}

TEST(ClusterWindow, TieOnTransportDayResolvesToHigherLevel) {
  const Day now = 10;
  ClusterWindow w;
  w.Apply(Encounter(now - 1, 2, now - 1), now);
  w.ApplyAll({Update(now - 1, 2, 12, now), Update(now - 1, 2, 5, now)}, now);
  // The lower level applies first and takes the count; the higher one then
  // finds no cluster at level 2 and lands as a fresh count.
  const std::vector<Cluster> c = w.Clusters(now);
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c.back().risk_level, 12);
}

TEST(ClusterWindow, OldDaysArePruned) {
  ClusterWindow w;
  w.Apply(Encounter(0, 5, 0), 0);
  EXPECT_EQ(w.CountOn(0), 1);
  w.Prune(kMaxLookbackDays);
  EXPECT_EQ(w.CountOn(0), 1);
  w.Prune(kMaxLookbackDays + 1);
  EXPECT_TRUE(w.Clusters(kMaxLookbackDays + 1).empty());
  w.Apply(Encounter(0, 5, 20), 20);
  EXPECT_TRUE(w.Clusters(20).empty());
}

// Random encounter and update streams, where every update refers to a level
// that the sender previously announced, so no anomalies arise. The window
// must agree with the from-scratch replay and conserve counts per day.
TEST(ClusterWindow, MatchesReplayAndConservesCounts) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Day now = 20;
    std::vector<RiskMessage> log;
    std::map<Day, std::vector<RiskLevel>> sent;
    for (int i = 0; i < 200; ++i) {
      const Day day = now - UniformInt(rng, 0, kMaxLookbackDays);
      auto& levels = sent[day];
      if (levels.empty() || Bernoulli(rng, 0.5)) {
        const RiskLevel l = UniformInt(rng, 0, 15);
        levels.push_back(l);
        log.push_back(Encounter(day, l, now));
      } else {
        const size_t idx = UniformInt(rng, 0, static_cast<int>(levels.size()) - 1);
        const RiskLevel l = UniformInt(rng, 0, 15);
        log.push_back(Update(day, levels[idx], l, now));
        levels[idx] = l;
      }
    }
    ClusterWindow w;
    for (const RiskMessage& m : log) w.Apply(m, now);
    EXPECT_EQ(w.Clusters(now), ReplayClusters(log, now));
    EXPECT_EQ(w.anomalies(), 0);
    for (const auto& [day, levels] : sent) {
      EXPECT_EQ(w.CountOn(day), static_cast<int>(levels.size()));
    }
  }
}

TEST(TracingNetwork, EncounterMessagesConserveCounts) {
  const int n = 6;
  TracingNetwork net(std::vector<uint8_t>{1, 1, 1, 1, 0, 1}, 5);
  const Day day = 3;
  const std::vector<ContactEvent> contacts = {
      {day, 0, 1, 2, false}, {day, 0, 2, 1, false}, {day, 1, 4, 3, false}, {day, 3, 5, 1, true}};
  net.BeginTick(day);
  net.RecordContacts(day, contacts);
  for (AgentId id = 0; id < n; ++id) {
    if (net.app_user(id)) net.SendEncounterMessages(id, day, id, day);
  }
  net.Route(day);
  net.BeginTick(day + 1);
  // Agent 0 met 1 twice and 2 once; agent 1's contact with the non-user 4 is
  // invisible to the app.
  EXPECT_EQ(net.window(0).CountOn(day), 3);
  EXPECT_EQ(net.window(1).CountOn(day), 2);
  EXPECT_EQ(net.window(2).CountOn(day), 1);
  EXPECT_EQ(net.window(4).CountOn(day), 0);
  EXPECT_EQ(net.Clusters(0, day + 1), (std::vector<Cluster>{{1, 1, 2}, {1, 2, 1}}));
  EXPECT_EQ(net.Clusters(5, day + 1), (std::vector<Cluster>{{1, 3, 1}}));
  EXPECT_EQ(net.anomalies(), 0);
  EXPECT_EQ(net.unroutable(), 0);
}

TEST(TracingNetwork, PositiveNoticeReachesContacts) {
  TracingNetwork net(std::vector<uint8_t>{1, 1, 1}, 9);
  net.BeginTick(2);
  net.RecordContacts(2, std::vector<ContactEvent>{{2, 0, 1, 1, false}});
  net.SendPositiveNotices(0, 4);
  net.Route(4);
  EXPECT_EQ(net.last_notice_day(1), 4);
  EXPECT_EQ(net.last_notice_day(2), kNoDay);
}

}  // namespace
}  // namespace pct
