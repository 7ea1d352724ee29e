#ifndef PCT_CLI_CONFIG_H_
#define PCT_CLI_CONFIG_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pct/common/json_util.h"
#include "pct/epi/config.h"
#include "pct/epi/scenario.h"
#include "pct/predict/baselines.h"
#include "pct/predict/recommend.h"
#include "pct/setnet/train.h"

namespace pct {

// Everything a subcommand needs. Built from defaults, then the --config
// file, then explicit flags. The key reference is docs/config_schema.json.
struct RunConfig {
  std::string subcommand;
  uint64_t seed = 1;
  std::string out_root = "out";
  // Exact output directory; overrides out/<subcommand>/<timestamp>-<hash>.
  std::string run_dir;

  WorldConfig world;
  ScenarioParams scenario;
  RecommendationMap recommendation;
  HeuristicRules heuristic;
  TrainConfig train;

  std::string method = "nt";
  std::vector<std::string> methods = {"nt", "bct", "heuristic"};
  std::string checkpoint;
  std::string bins;
  bool trace_messages = false;

  // bins / gen-data / retrain
  int runs = 24;
  int bin_runs = 8;
  int heldout_runs = 0;
  std::string driver = "oracle";
  bool jsonl = false;
  bool save_data = false;
  int iterations = 3;
  double finetune_peak_lr = 5e-5;

  // train
  std::string data_dir;
  std::string init_checkpoint;

  // evaluate / sweep
  int seeds = 12;
  bool match_contacts = true;
  double contacts_center = 5.61;
  double contacts_half_width = 0.5;
  int resamples = 10000;
  std::string sweep_kind = "mobility";
  std::vector<double> grid;

  // plot
  std::string figure;
  std::string input_dir;
};

inline constexpr absl::string_view kSubcommands[] = {"simulate", "bins",     "gen-data", "train",
                                                     "retrain",  "evaluate", "sweep",    "plot"};

// Parses a config file; errors carry "file:line: key.path: message".
absl::StatusOr<RunConfig> RunConfigFromText(absl::string_view text, absl::string_view source,
                                            RunConfig base = {});
// Canonical form used for the config hash and the manifest.
Json RunConfigToJson(const RunConfig& c);
std::string ConfigHash(const RunConfig& c);

// Checks every field the subcommand will use, before any work starts.
absl::Status ValidateRunConfig(const RunConfig& c);

}  // namespace pct

#endif  // PCT_CLI_CONFIG_H_
