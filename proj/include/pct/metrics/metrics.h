#ifndef PCT_METRICS_METRICS_H_
#define PCT_METRICS_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/epi/types.h"

namespace pct {

struct InfectionTree {
  std::vector<InfectionEdge> edges;
  std::vector<AgentId> roots;
};

// Checks the forest structure: each infectee has one infector, no root is
// infected by anyone, no cycles, and edge days never decrease along a path.
absl::Status ValidateTree(const InfectionTree& tree, int num_agents);

// Children of recovered infected agents divided by the number of recovered
// infected agents (roots included), from compartments at the horizon.
struct REstimate {
  double r = 0.0;
  int parents = 0;
  int children = 0;
};
absl::StatusOr<REstimate> EstimateR(const InfectionTree& tree,
                                    std::span<const Compartment> final_compartments);

// Agents recommended level 3 while Susceptible or Recovered, over the
// population.
double FalseQuarantineFraction(std::span<const int> recommended_levels,
                               std::span<const Compartment> compartments);

struct DaySeries {
  Day day = 0;
  int new_cases = 0;
  int cumulative_cases = 0;
  double contacts_per_agent = 0.0;
  std::array<int, 4> compartments{};
  std::array<int, kNumBehaviorLevels> level_counts{};
  double false_quarantine = 0.0;
};

struct RunSummary {
  std::string method;
  Json scenario;
  uint64_t seed = 0;
  int num_agents = 0;
  int num_app_users = 0;
  std::vector<DaySeries> series;
  // Unset when no infected agent had recovered by the horizon.
  std::optional<REstimate> r;
  double mean_contacts = 0.0;
  int total_cases = 0;
  long messages_routed = 0;
  long protocol_anomalies = 0;
};

Json RunSummaryToJson(const RunSummary& s);
absl::StatusOr<RunSummary> RunSummaryFromJson(const Json& j);
std::string SeriesCsv(const RunSummary& s);

// The matched-contacts predicate: mean contacts/day within
// (center - half_width, center + half_width).
struct ContactsWindow {
  double center = 5.61;
  double half_width = 0.5;
  bool Contains(const RunSummary& s) const {
    return s.mean_contacts > center - half_width && s.mean_contacts < center + half_width;
  }
};

// One run of a Pareto sweep.
struct SweepPoint {
  std::string method;
  double grid_value = 0.0;
  uint64_t seed = 0;
  double contacts = 0.0;
  std::optional<double> r;
};

struct ParetoBin {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  double mean_contacts = 0.0;
  double mean_r = 0.0;
  double se_r = 0.0;
};

struct ParetoTable {
  std::vector<ParetoBin> bins;
  int undefined_runs = 0;
};

// Groups points into equal-width contact bins [k w, (k+1) w) and reports
// the mean R with its standard error; runs without an R are counted.
ParetoTable BinPoints(std::span<const SweepPoint> points, double bin_width = 0.5);

struct BootstrapSummary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::vector<double> resampled_means;
};

// Distribution of the mean under resampling with replacement.
BootstrapSummary BootstrapMean(std::span<const double> values, int resamples, uint64_t seed);

// Two-sided permutation test of equal means: the fraction of label
// shuffles with |mean difference| at least the observed one, with the
// observed labelling counted once.
double PermutationPValue(std::span<const double> a, std::span<const double> b, int resamples,
                         uint64_t seed);

// Fraction of bootstrap resamples, each list resampled independently, in
// which mean(a) < mean(b).
double BootstrapOrderingFraction(std::span<const double> a, std::span<const double> b,
                                 int resamples, uint64_t seed);

struct MethodComparison {
  std::vector<std::string> methods;
  std::vector<BootstrapSummary> summaries;
  // p_values[i][j]: permutation p-value between methods i and j.
  std::vector<std::vector<double>> p_values;
};

absl::StatusOr<MethodComparison> BootstrapCompare(
    const std::vector<std::pair<std::string, std::vector<double>>>& r_by_method,
    int resamples = 10000, uint64_t seed = 0);

}  // namespace pct

#endif  // PCT_METRICS_METRICS_H_
