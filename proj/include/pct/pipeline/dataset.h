#ifndef PCT_PIPELINE_DATASET_H_
#define PCT_PIPELINE_DATASET_H_

#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/epi/config.h"
#include "pct/pipeline/runner.h"
#include "pct/pipeline/sampler.h"
#include "pct/setnet/train.h"

namespace pct {

struct SampleSet {
  std::vector<SetInput> inputs;
  std::vector<Target> targets;
  std::vector<SampleMeta> meta;

  size_t size() const { return inputs.size(); }
  SampleView view() const { return {inputs, targets}; }
  void Append(RunOutput&& run);
};

// Five training runs for every validation run.
inline bool IsValidationRun(int run_id) { return run_id % 6 == 5; }

// Packed little-endian binary: magic "PCTDS001", sample count, then per
// sample meta, target, statuses, profile bytes and clusters. The layout is
// documented in docs/dataset.md.
absl::Status WriteSamplesBinary(const SampleSet& set, const std::string& path);
absl::StatusOr<SampleSet> ReadSamplesBinary(const std::string& path);
// One JSON object per sample.
void WriteSamplesJsonl(const SampleSet& set, std::ostream& out);
Json SampleToJson(const SetInput& input, const Target& target, const SampleMeta& meta);

struct GenerateConfig {
  WorldConfig world;
  ScenarioParams base_scenario;
  ScenarioRanges ranges;
  int num_runs = 24;
  uint64_t seed = 0;
  // kNoisyOracle or kSetNet (with a model).
  MethodConfig driver = MethodConfig::For(Method::kNoisyOracle);
};

struct GeneratedData {
  SampleSet train;
  SampleSet val;
  std::vector<RunSummary> runs;
  Json manifest;
};

// Per-run scenario: SampleScenario over MakeRng(seed, kScenario, {run_id}).
ScenarioParams RunScenario(const GenerateConfig& config, int run_id);

// Runs the simulations in parallel and merges them in run_id order.
absl::StatusOr<GeneratedData> GenerateDataset(const GenerateConfig& config);

}  // namespace pct

#endif  // PCT_PIPELINE_DATASET_H_
