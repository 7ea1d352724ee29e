#ifndef PCT_PIPELINE_EXPERIMENTS_H_
#define PCT_PIPELINE_EXPERIMENTS_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/metrics/metrics.h"
#include "pct/pipeline/runner.h"

namespace pct {

// Per-run seeds: DeriveSeed(master, kRun, {i}). Every method and grid cell
// uses the same list, so comparisons share random numbers.
std::vector<uint64_t> RunSeeds(uint64_t master, int count);

struct EvaluateConfig {
  WorldConfig world;
  ScenarioParams base;
  std::vector<MethodConfig> methods;
  std::vector<uint64_t> seeds;
  // When set, each method's mobility factor is bisected so its mean
  // contacts/day hits window.center, and only runs inside the window enter
  // the comparison.
  bool match_contacts = true;
  ContactsWindow window;
  // Seeds used by the bisection (a prefix of `seeds` when empty).
  int calibration_seeds = 4;
  int bisection_steps = 10;
  int resamples = 10000;
  uint64_t bootstrap_seed = 0;
};

struct MethodRuns {
  std::string method;
  double mobility = 0.0;
  std::vector<RunSummary> runs;
  // R of runs that have one and lie in the contacts window.
  std::vector<double> r_values;
};

struct EvaluateResult {
  std::vector<MethodRuns> methods;
  MethodComparison comparison;
};

absl::StatusOr<EvaluateResult> EvaluateMethods(const EvaluateConfig& config);

enum class SweepKind { kMobility, kAdoption };
absl::StatusOr<SweepKind> ParseSweepKind(absl::string_view name);

struct SweepConfig {
  WorldConfig world;
  ScenarioParams base;
  SweepKind kind = SweepKind::kMobility;
  std::vector<double> grid;
  std::vector<MethodConfig> methods;
  std::vector<uint64_t> seeds;
  double bin_width = 0.5;
};

struct SweepRow {
  SweepPoint point;
  int seed_index = 0;
  // Empty on success.
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int failures = 0;
};

// One run per (method, grid value, seed), parallel over runs. Failed runs
// are recorded and the sweep continues.
absl::StatusOr<SweepResult> RunSweep(const SweepConfig& config);

// Mean R and its standard error per (method, grid value).
struct GridCell {
  std::string method;
  double grid_value = 0.0;
  int n = 0;
  int undefined = 0;
  double mean_contacts = 0.0;
  double mean_r = 0.0;
  double se_r = 0.0;
};
std::vector<GridCell> AggregateByGrid(const std::vector<SweepRow>& rows);

}  // namespace pct

#endif  // PCT_PIPELINE_EXPERIMENTS_H_
