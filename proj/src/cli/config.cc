#include "pct/cli/config.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "pct/pipeline/experiments.h"
#include "pct/pipeline/runner.h"

namespace pct {
namespace {

absl::Status ReadTop(const Json& j, RunConfig& c) {
  ObjectReader r(j, "");
  int agents = c.world.num_agents;
  int days = c.world.horizon_days;
  r.Read("seed", &c.seed)
      .Read("out", &c.out_root)
      .Read("run_dir", &c.run_dir)
      .Read("agents", &agents)
      .Read("days", &days)
      .Read("method", &c.method)
      .Read("methods", &c.methods)
      .Read("checkpoint", &c.checkpoint)
      .Read("bins", &c.bins)
      .Read("trace_messages", &c.trace_messages)
      .Read("runs", &c.runs)
      .Read("bin_runs", &c.bin_runs)
      .Read("heldout_runs", &c.heldout_runs)
      .Read("driver", &c.driver)
      .Read("jsonl", &c.jsonl)
      .Read("save_data", &c.save_data)
      .Read("iterations", &c.iterations)
      .Read("finetune_peak_lr", &c.finetune_peak_lr)
      .Read("data", &c.data_dir)
      .Read("init", &c.init_checkpoint)
      .Read("seeds", &c.seeds)
      .Read("match_contacts", &c.match_contacts)
      .Read("resamples", &c.resamples)
      .Read("figure", &c.figure)
      .Read("input", &c.input_dir);
  if (const Json* w = r.Lookup("contacts_window")) {
    ObjectReader wr(*w, "contacts_window");
    wr.Read("center", &c.contacts_center).Read("half_width", &c.contacts_half_width);
    if (auto s = wr.Finish(); !s.ok()) return s;
  }
  if (const Json* s = r.Lookup("sweep")) {
    ObjectReader sr(*s, "sweep");
    sr.Read("kind", &c.sweep_kind).Read("grid", &c.grid);
    if (auto st = sr.Finish(); !st.ok()) return st;
  }
  if (const Json* w = r.Lookup("world")) {
    absl::StatusOr<WorldConfig> wc = WorldConfigFromJson(*w, "world", c.world);
    if (!wc.ok()) return wc.status();
    c.world = *wc;
  }
  if (r.Has("agents")) c.world.num_agents = agents;
  if (r.Has("days")) c.world.horizon_days = days;
  if (const Json* s = r.Lookup("scenario")) {
    absl::StatusOr<ScenarioParams> sc = ScenarioFromJson(*s, "scenario", c.scenario);
    if (!sc.ok()) return sc.status();
    c.scenario = *sc;
  }
  if (const Json* m = r.Lookup("recommendation")) {
    absl::StatusOr<RecommendationMap> rm = RecommendationMapFromJson(*m, "recommendation");
    if (!rm.ok()) return rm.status();
    c.recommendation = *rm;
  }
  if (const Json* h = r.Lookup("heuristic")) {
    absl::StatusOr<HeuristicRules> hr = HeuristicRulesFromJson(*h, "heuristic");
    if (!hr.ok()) return hr.status();
    c.heuristic = *hr;
  }
  if (const Json* t = r.Lookup("train")) {
    absl::StatusOr<TrainConfig> tc = TrainConfigFromJson(*t, "train");
    if (!tc.ok()) return tc.status();
    c.train = *tc;
  }
  return r.Finish();
}

absl::Status Positive(int v, absl::string_view key) {
  if (v < 1) return absl::InvalidArgumentError(absl::StrCat(key, ": must be >= 1"));
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RunConfig> RunConfigFromText(absl::string_view text, absl::string_view source,
                                            RunConfig base) {
  absl::StatusOr<Json> j = ParseJson(text, source);
  if (!j.ok()) return j.status();
  if (auto s = ReadTop(*j, base); !s.ok()) return AttachLine(s, text, source);
  return base;
}

Json RunConfigToJson(const RunConfig& c) {
  return Json{{"subcommand", c.subcommand},
              {"seed", c.seed},
              {"world", WorldConfigToJson(c.world)},
              {"scenario", ScenarioToJson(c.scenario)},
              {"recommendation", RecommendationMapToJson(c.recommendation)},
              {"heuristic", HeuristicRulesToJson(c.heuristic)},
              {"train", TrainConfigToJson(c.train)},
              {"method", c.method},
              {"methods", c.methods},
              {"checkpoint", c.checkpoint},
              {"bins", c.bins},
              {"trace_messages", c.trace_messages},
              {"runs", c.runs},
              {"bin_runs", c.bin_runs},
              {"heldout_runs", c.heldout_runs},
              {"driver", c.driver},
              {"jsonl", c.jsonl},
              {"save_data", c.save_data},
              {"iterations", c.iterations},
              {"finetune_peak_lr", c.finetune_peak_lr},
              {"data", c.data_dir},
              {"init", c.init_checkpoint},
              {"seeds", c.seeds},
              {"match_contacts", c.match_contacts},
              {"contacts_window", {{"center", c.contacts_center},
                                   {"half_width", c.contacts_half_width}}},
              {"resamples", c.resamples},
              {"sweep", {{"kind", c.sweep_kind}, {"grid", c.grid}}},
              {"figure", c.figure},
              {"input", c.input_dir}};
}

std::string ConfigHash(const RunConfig& c) { return Fnv1aHex(RunConfigToJson(c).dump()); }

absl::Status ValidateRunConfig(const RunConfig& c) {
  if (std::find(std::begin(kSubcommands), std::end(kSubcommands), c.subcommand) ==
      std::end(kSubcommands)) {
    return absl::InvalidArgumentError(absl::StrCat("unknown subcommand '", c.subcommand, "'"));
  }
  if (auto s = c.world.Validate(); !s.ok()) return s;
  if (auto s = c.scenario.Validate(); !s.ok()) return s;
  if (auto s = c.recommendation.Validate(); !s.ok()) return s;
  if (auto s = c.heuristic.Validate(); !s.ok()) return s;
  const std::string& cmd = c.subcommand;
  if (cmd == "simulate") {
    absl::StatusOr<Method> m = ParseMethod(c.method);
    if (!m.ok()) return m.status();
    if (*m == Method::kSetNet && c.checkpoint.empty()) {
      return absl::InvalidArgumentError("checkpoint required for method ds-pct (--checkpoint)");
    }
  }
  if (cmd == "bins") {
    if (auto s = Positive(c.bin_runs, "bin_runs"); !s.ok()) return s;
    if (c.heldout_runs < 0) return absl::InvalidArgumentError("heldout_runs: must be >= 0");
  }
  if (cmd == "gen-data") {
    if (auto s = Positive(c.runs, "runs"); !s.ok()) return s;
    if (c.driver != "oracle" && c.driver != "ds-pct") {
      return absl::InvalidArgumentError("driver: expected oracle or ds-pct");
    }
    if (c.driver == "ds-pct" && c.checkpoint.empty()) {
      return absl::InvalidArgumentError("checkpoint required for driver ds-pct (--checkpoint)");
    }
  }
  if (cmd == "train") {
    if (c.data_dir.empty()) return absl::InvalidArgumentError("data: dataset directory required");
    if (auto s = c.train.Validate(); !s.ok()) return s;
  }
  if (cmd == "retrain") {
    if (auto s = Positive(c.iterations, "iterations"); !s.ok()) return s;
    if (auto s = Positive(c.runs, "runs"); !s.ok()) return s;
    if (auto s = c.train.Validate(); !s.ok()) return s;
  }
  if (cmd == "evaluate" || cmd == "sweep") {
    if (c.methods.empty()) return absl::InvalidArgumentError("methods: must not be empty");
    for (const std::string& name : c.methods) {
      absl::StatusOr<Method> m = ParseMethod(name);
      if (!m.ok()) return m.status();
      if (*m == Method::kSetNet && c.checkpoint.empty()) {
        return absl::InvalidArgumentError("checkpoint required for method ds-pct (--checkpoint)");
      }
    }
    if (auto s = Positive(c.seeds, "seeds"); !s.ok()) return s;
  }
  if (cmd == "evaluate") {
    if (c.seeds < 2) return absl::InvalidArgumentError("seeds: evaluate needs at least 2");
    if (auto s = Positive(c.resamples, "resamples"); !s.ok()) return s;
  }
  if (cmd == "sweep") {
    absl::StatusOr<SweepKind> k = ParseSweepKind(c.sweep_kind);
    if (!k.ok()) return k.status();
    if (c.grid.empty()) return absl::InvalidArgumentError("sweep.grid: must not be empty");
  }
  if (cmd == "plot") {
    static constexpr absl::string_view kFigures[] = {"pareto", "adoption", "cases", "quarantine",
                                                     "comparison"};
    if (std::find(std::begin(kFigures), std::end(kFigures), c.figure) == std::end(kFigures)) {
      return absl::InvalidArgumentError(
          "figure: expected pareto, adoption, cases, quarantine or comparison");
    }
    if (c.input_dir.empty()) return absl::InvalidArgumentError("input: directory required");
  }
  return absl::OkStatus();
}

}  // namespace pct
