#include "pct/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"

namespace pct {
namespace {

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linear-interpolated quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

absl::Status ValidateTree(const InfectionTree& tree, int num_agents) {
  std::vector<int> infector(num_agents, -2);
  std::vector<Day> infected_day(num_agents, kNoDay);
  for (AgentId r : tree.roots) {
    if (r < 0 || r >= num_agents) return absl::InvalidArgumentError("root id out of range");
    if (infector[r] != -2) return absl::InvalidArgumentError("duplicate root");
    infector[r] = -1;
  }
  for (const InfectionEdge& e : tree.edges) {
    if (e.infector < 0 || e.infector >= num_agents || e.infectee < 0 || e.infectee >= num_agents) {
      return absl::InvalidArgumentError("edge id out of range");
    }
    if (infector[e.infectee] != -2) {
      return absl::InvalidArgumentError(absl::StrCat("agent ", e.infectee, " infected twice"));
    }
    infector[e.infectee] = e.infector;
    infected_day[e.infectee] = e.day;
  }
  for (const InfectionEdge& e : tree.edges) {
    if (infector[e.infector] == -2) {
      return absl::InvalidArgumentError(
          absl::StrCat("infector ", e.infector, " was never infected"));
    }
    if (infected_day[e.infector] != kNoDay && infected_day[e.infector] > e.day) {
      return absl::InvalidArgumentError("edge days decrease along a path");
    }
  }
  // Walk to the root from every node; a walk longer than the population
  // means a cycle.
  for (int a = 0; a < num_agents; ++a) {
    int steps = 0;
    for (int cur = a; cur >= 0 && infector[cur] >= 0; cur = infector[cur]) {
      if (++steps > num_agents) return absl::InvalidArgumentError("infection cycle");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<REstimate> EstimateR(const InfectionTree& tree,
                                    std::span<const Compartment> final_compartments) {
  const int n = static_cast<int>(final_compartments.size());
  std::vector<uint8_t> infected(n, 0);
  std::vector<int> children(n, 0);
  for (AgentId r : tree.roots) infected[r] = 1;
  for (const InfectionEdge& e : tree.edges) {
    infected[e.infectee] = 1;
    ++children[e.infector];
  }
  REstimate est;
  for (int a = 0; a < n; ++a) {
    if (!infected[a] || final_compartments[a] != Compartment::kRecovered) continue;
    ++est.parents;
    est.children += children[a];
  }
  if (est.parents == 0) return absl::FailedPreconditionError("R undefined for this run");
  est.r = static_cast<double>(est.children) / est.parents;
  return est;
}

double FalseQuarantineFraction(std::span<const int> recommended_levels,
                               std::span<const Compartment> compartments) {
  if (compartments.empty()) return 0.0;
  int healthy = 0;
  for (size_t i = 0; i < compartments.size(); ++i) {
    const Compartment c = compartments[i];
    if (recommended_levels[i] == kQuarantineLevel &&
        (c == Compartment::kSusceptible || c == Compartment::kRecovered)) {
      ++healthy;
    }
  }
  return static_cast<double>(healthy) / static_cast<double>(compartments.size());
}

Json RunSummaryToJson(const RunSummary& s) {
  Json series = Json::array();
  for (const DaySeries& d : s.series) {
    series.push_back(Json{{"day", d.day},
                          {"new_cases", d.new_cases},
                          {"cumulative_cases", d.cumulative_cases},
                          {"contacts_per_agent", d.contacts_per_agent},
                          {"compartments", d.compartments},
                          {"level_counts", d.level_counts},
                          {"false_quarantine", d.false_quarantine}});
  }
  Json j{{"method", s.method},
         {"scenario", s.scenario},
         {"seed", s.seed},
         {"num_agents", s.num_agents},
         {"num_app_users", s.num_app_users},
         {"mean_contacts", s.mean_contacts},
         {"total_cases", s.total_cases},
         {"messages_routed", s.messages_routed},
         {"protocol_anomalies", s.protocol_anomalies},
         {"series", series}};
  if (s.r.has_value()) {
    j["r"] = s.r->r;
    j["r_parents"] = s.r->parents;
    j["r_children"] = s.r->children;
  } else {
    j["r"] = nullptr;
  }
  return j;
}

absl::StatusOr<RunSummary> RunSummaryFromJson(const Json& j) {
  RunSummary s;
  try {
    s.method = j.at("method").get<std::string>();
    s.scenario = j.at("scenario");
    s.seed = j.at("seed").get<uint64_t>();
    s.num_agents = j.at("num_agents").get<int>();
    s.num_app_users = j.at("num_app_users").get<int>();
    s.mean_contacts = j.at("mean_contacts").get<double>();
    s.total_cases = j.at("total_cases").get<int>();
    s.messages_routed = j.at("messages_routed").get<long>();
    s.protocol_anomalies = j.at("protocol_anomalies").get<long>();
    if (!j.at("r").is_null()) {
      s.r = REstimate{j.at("r").get<double>(), j.at("r_parents").get<int>(),
                      j.at("r_children").get<int>()};
    }
    for (const Json& d : j.at("series")) {
      DaySeries day;
      day.day = d.at("day").get<Day>();
      day.new_cases = d.at("new_cases").get<int>();
      day.cumulative_cases = d.at("cumulative_cases").get<int>();
      day.contacts_per_agent = d.at("contacts_per_agent").get<double>();
      day.compartments = d.at("compartments").get<std::array<int, 4>>();
      day.level_counts = d.at("level_counts").get<std::array<int, kNumBehaviorLevels>>();
      day.false_quarantine = d.at("false_quarantine").get<double>();
      s.series.push_back(day);
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("run summary: ", e.what()));
  }
  return s;
}

std::string SeriesCsv(const RunSummary& s) {
  std::ostringstream out;
  out << "day,new_cases,cumulative_cases,contacts_per_agent,S,E,I,R,level0,level1,level2,level3,"
         "false_quarantine\n";
  for (const DaySeries& d : s.series) {
    out << d.day << ',' << d.new_cases << ',' << d.cumulative_cases << ','
        << d.contacts_per_agent;
    for (int c : d.compartments) out << ',' << c;
    for (int l : d.level_counts) out << ',' << l;
    out << ',' << d.false_quarantine << '\n';
  }
  return out.str();
}

ParetoTable BinPoints(std::span<const SweepPoint> points, double bin_width) {
  ParetoTable table;
  std::map<long, std::vector<const SweepPoint*>> groups;
  for (const SweepPoint& p : points) {
    if (!p.r.has_value()) {
      ++table.undefined_runs;
      continue;
    }
    groups[static_cast<long>(std::floor(p.contacts / bin_width))].push_back(&p);
  }
  for (const auto& [key, members] : groups) {
    ParetoBin bin;
    bin.lo = key * bin_width;
    bin.hi = (key + 1) * bin_width;
    bin.n = static_cast<int>(members.size());
    std::vector<double> rs;
    for (const SweepPoint* p : members) {
      bin.mean_contacts += p->contacts;
      rs.push_back(*p->r);
    }
    bin.mean_contacts /= bin.n;
    bin.mean_r = Mean(rs);
    if (bin.n > 1) {
      double ss = 0.0;
      for (double r : rs) ss += (r - bin.mean_r) * (r - bin.mean_r);
      bin.se_r = std::sqrt(ss / (bin.n - 1)) / std::sqrt(static_cast<double>(bin.n));
    }
    table.bins.push_back(bin);
  }
  return table;
}

BootstrapSummary BootstrapMean(std::span<const double> values, int resamples, uint64_t seed) {
  BootstrapSummary out;
  out.mean = Mean(values);
  if (values.empty() || resamples <= 0) return out;
  Rng rng = MakeRng(seed, Stream::kBootstrap, {0});
  std::uniform_int_distribution<size_t> pick(0, values.size() - 1);
  out.resampled_means.resize(resamples);
  for (int b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
    out.resampled_means[b] = sum / static_cast<double>(values.size());
  }
  std::vector<double> sorted = out.resampled_means;
  std::sort(sorted.begin(), sorted.end());
  out.median = Quantile(sorted, 0.5);
  out.q1 = Quantile(sorted, 0.25);
  out.q3 = Quantile(sorted, 0.75);
  return out;
}

double PermutationPValue(std::span<const double> a, std::span<const double> b, int resamples,
                         uint64_t seed) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double observed = std::abs(Mean(a) - Mean(b));
  // Tolerance keeps exact ties (identical lists) from being lost to
  // summation-order rounding.
  const double tol = 1e-12 * std::max(1.0, observed);
  Rng rng = MakeRng(seed, Stream::kBootstrap, {1});
  int extreme = 0;
  const size_t na = a.size();
  for (int t = 0; t < resamples; ++t) {
    std::shuffle(pooled.begin(), pooled.end(), rng);
    const double ma = Mean(std::span<const double>(pooled.data(), na));
    const double mb = Mean(std::span<const double>(pooled.data() + na, pooled.size() - na));
    if (std::abs(ma - mb) >= observed - tol) ++extreme;
  }
  return (extreme + 1.0) / (resamples + 1.0);
}

double BootstrapOrderingFraction(std::span<const double> a, std::span<const double> b,
                                 int resamples, uint64_t seed) {
  if (a.empty() || b.empty() || resamples <= 0) return 0.0;
  Rng rng = MakeRng(seed, Stream::kBootstrap, {2});
  std::uniform_int_distribution<size_t> pa(0, a.size() - 1);
  std::uniform_int_distribution<size_t> pb(0, b.size() - 1);
  int ordered = 0;
  for (int t = 0; t < resamples; ++t) {
    double sa = 0.0;
    double sb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sa += a[pa(rng)];
    for (size_t i = 0; i < b.size(); ++i) sb += b[pb(rng)];
    if (sa / a.size() < sb / b.size()) ++ordered;
  }
  return static_cast<double>(ordered) / resamples;
}

absl::StatusOr<MethodComparison> BootstrapCompare(
    const std::vector<std::pair<std::string, std::vector<double>>>& r_by_method, int resamples,
    uint64_t seed) {
  MethodComparison out;
  for (const auto& [name, values] : r_by_method) {
    if (values.size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("method ", name, " has ", values.size(), " runs; need at least 2"));
    }
  }
  const size_t m = r_by_method.size();
  out.p_values.assign(m, std::vector<double>(m, 1.0));
  for (size_t i = 0; i < m; ++i) {
    out.methods.push_back(r_by_method[i].first);
    out.summaries.push_back(BootstrapMean(r_by_method[i].second, resamples, DeriveSeed(seed, {i})));
    for (size_t j = 0; j < i; ++j) {
      const double p = PermutationPValue(r_by_method[i].second, r_by_method[j].second, resamples,
                                         DeriveSeed(seed, {i, j}));
      out.p_values[i][j] = p;
      out.p_values[j][i] = p;
    }
  }
  return out;
}

}  // namespace pct
