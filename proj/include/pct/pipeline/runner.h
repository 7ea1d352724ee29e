#ifndef PCT_PIPELINE_RUNNER_H_
#define PCT_PIPELINE_RUNNER_H_

#include <ostream>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pct/epi/config.h"
#include "pct/epi/event_log.h"
#include "pct/epi/scenario.h"
#include "pct/metrics/metrics.h"
#include "pct/predict/baselines.h"
#include "pct/predict/recommend.h"
#include "pct/setnet/features.h"
#include "pct/setnet/params.h"
#include "pct/setnet/train.h"
#include "pct/tracing/risk.h"

namespace pct {

enum class Method {
  kNoTracing,
  kBinary,
  kHeuristic,
  kNoisyOracle,
  kSetNet,
};

// Command-line names: nt, bct, heuristic, oracle, ds-pct.
absl::StatusOr<Method> ParseMethod(absl::string_view name);
absl::string_view MethodName(Method method);

struct MethodConfig {
  Method method = Method::kNoTracing;
  RiskBinTable bins = RiskBinTable::Uniform();
  RecommendationMap recommendation;
  HeuristicRules heuristic;
  // Required for kSetNet; not owned.
  const Params<float>* model = nullptr;

  absl::Status Validate() const;
  static MethodConfig For(Method m) {
    MethodConfig c;
    c.method = m;
    return c;
  }
};

struct RunOptions {
  // Emit one training sample per app user and day.
  bool collect_samples = false;
  // Record the raw risk value of every encounter message sent.
  bool collect_message_risks = false;
  EventLog* event_log = nullptr;
  // JSONL trace of routed messages.
  std::ostream* message_trace = nullptr;
};

struct SampleMeta {
  int32_t run_id = 0;
  AgentId agent = 0;
  Day day = 0;
};

struct RunOutput {
  RunSummary summary;
  InfectionTree tree;
  std::vector<SetInput> inputs;
  // Ground-truth infectiousness read from the simulator; zero before day 0.
  std::vector<Target> targets;
  std::vector<SampleMeta> meta;
  std::vector<double> message_risks;
};

// Runs config.horizon_days days of the world with app users driven by
// `method`. The run seed is params.seed. Samples carry run_id.
absl::StatusOr<RunOutput> RunSimulation(const WorldConfig& config, const ScenarioParams& params,
                                        const MethodConfig& method, const RunOptions& options = {},
                                        int32_t run_id = 0);

}  // namespace pct

#endif  // PCT_PIPELINE_RUNNER_H_
