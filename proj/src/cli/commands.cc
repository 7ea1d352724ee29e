#include "pct/cli/commands.h"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "pct/common/rng.h"
#include "pct/epi/event_log.h"
#include "pct/metrics/plots.h"
#include "pct/pipeline/calibrate.h"
#include "pct/pipeline/dataset.h"
#include "pct/pipeline/experiments.h"
#include "pct/pipeline/retrain.h"
#include "pct/pipeline/runner.h"
#include "pct/setnet/params.h"

namespace pct {
namespace fs = std::filesystem;
namespace {

absl::Status WriteJson(const fs::path& path, const Json& j) {
  return WriteFile(path.string(), j.dump(2) + "\n");
}

absl::Status WriteManifest(const fs::path& dir, const RunConfig& config, Json extra = Json::object()) {
  Json m{{"tool", "pct"},
         {"subcommand", config.subcommand},
         {"seed", config.seed},
         {"config_hash", ConfigHash(config)},
         {"config", RunConfigToJson(config)}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return WriteJson(dir / "manifest.json", m);
}

std::string CsvSafe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

std::string OptionalR(const std::optional<double>& r) {
  return r.has_value() ? absl::StrCat(*r) : "";
}

// Models and bin tables referenced by a config, loaded once.
struct Resources {
  std::unique_ptr<Params<float>> model;
  RiskBinTable bins = RiskBinTable::Uniform();
};

absl::StatusOr<RiskBinTable> LoadBinsFile(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<Json> j = ParseJson(*text, path);
  if (!j.ok()) return j.status();
  absl::StatusOr<RiskBinTable> t = RiskBinTableFromJson(*j);
  if (!t.ok()) return absl::InvalidArgumentError(absl::StrCat(path, ": ", t.status().message()));
  return t;
}

// Loads the checkpoint when `need_model`. Bins come from --bins, else from
// bins.json beside the checkpoint, else the uniform table.
absl::StatusOr<Resources> LoadResources(const RunConfig& config, bool need_model) {
  Resources r;
  std::string bins_path = config.bins;
  if (need_model) {
    if (config.checkpoint.empty()) return absl::InvalidArgumentError("checkpoint required");
    absl::StatusOr<Params<float>> p = LoadParams(config.checkpoint);
    if (!p.ok()) return p.status();
    r.model = std::make_unique<Params<float>>(std::move(*p));
    const fs::path beside = fs::path(config.checkpoint).parent_path() / "bins.json";
    if (bins_path.empty() && fs::exists(beside)) bins_path = beside.string();
  }
  if (!bins_path.empty()) {
    absl::StatusOr<RiskBinTable> t = LoadBinsFile(bins_path);
    if (!t.ok()) return t.status();
    r.bins = *t;
  }
  return r;
}

absl::StatusOr<MethodConfig> MakeMethod(const std::string& name, const RunConfig& config,
                                        const Resources& res) {
  absl::StatusOr<Method> m = ParseMethod(name);
  if (!m.ok()) return m.status();
  MethodConfig mc = MethodConfig::For(*m);
  mc.bins = res.bins;
  mc.recommendation = config.recommendation;
  mc.heuristic = config.heuristic;
  mc.model = res.model.get();
  if (auto s = mc.Validate(); !s.ok()) return s;
  return mc;
}

bool UsesModel(const RunConfig& config) {
  if (config.subcommand == "simulate") return config.method == "ds-pct";
  if (config.subcommand == "gen-data") return config.driver == "ds-pct";
  for (const std::string& m : config.methods) {
    if (m == "ds-pct") return true;
  }
  return false;
}

GenerateConfig MakeGenerateConfig(const RunConfig& config) {
  GenerateConfig g;
  g.world = config.world;
  g.base_scenario = config.scenario;
  g.num_runs = config.runs;
  g.seed = config.seed;
  return g;
}

// Bins from --bins, or calibrated on separate seeds and written to
// dir/bins.json.
absl::StatusOr<RiskBinTable> ResolveBins(const RunConfig& config, const fs::path& dir,
                                         std::ostream& log) {
  if (!config.bins.empty()) {
    absl::StatusOr<RiskBinTable> t = LoadBinsFile(config.bins);
    if (!t.ok()) return t.status();
    if (auto s = WriteJson(dir / "bins.json", RiskBinTableToJson(*t)); !s.ok()) return s;
    return t;
  }
  log << "calibrating risk bins on " << config.bin_runs << " noisy-oracle runs\n";
  absl::StatusOr<BinCalibration> cal = CalibrateBins(MakeGenerateConfig(config), config.bin_runs, 0);
  if (!cal.ok()) return cal.status();
  if (auto s = WriteJson(dir / "bins.json", RiskBinTableToJson(cal->table)); !s.ok()) return s;
  return cal->table;
}

int Fail(std::ostream& err, const absl::Status& s) {
  err << "error: " << s.message() << '\n';
  return kExitError;
}

int CmdSimulate(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<Resources> res = LoadResources(config, UsesModel(config));
  if (!res.ok()) return Fail(err, res.status());
  absl::StatusOr<MethodConfig> method = MakeMethod(config.method, config, *res);
  if (!method.ok()) return Fail(err, method.status());
  std::ofstream events(dir / "events.jsonl", std::ios::binary);
  EventLog event_log(&events);
  std::ofstream messages;
  RunOptions options;
  options.event_log = &event_log;
  if (config.trace_messages) {
    messages.open(dir / "messages.jsonl", std::ios::binary);
    options.message_trace = &messages;
  }
  ScenarioParams params = config.scenario;
  params.seed = config.seed;
  absl::StatusOr<RunOutput> out = RunSimulation(config.world, params, *method, options);
  if (!out.ok()) return Fail(err, out.status());
  events.close();
  if (auto s = WriteFile((dir / "metrics.csv").string(), SeriesCsv(out->summary)); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteJson(dir / "summary.json", RunSummaryToJson(out->summary)); !s.ok()) {
    return Fail(err, s);
  }
  std::ostringstream tree;
  tree << "infector,infectee,day\n";
  for (const InfectionEdge& e : out->tree.edges) {
    tree << e.infector << ',' << e.infectee << ',' << e.day << '\n';
  }
  if (auto s = WriteFile((dir / "infections.csv").string(), tree.str()); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  log << "method " << config.method << ": cases " << out->summary.total_cases << ", contacts/day "
      << out->summary.mean_contacts << ", R "
      << (out->summary.r ? absl::StrCat(out->summary.r->r) : std::string("undefined")) << '\n';
  return kExitOk;
}

int CmdBins(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<BinCalibration> cal =
      CalibrateBins(MakeGenerateConfig(config), config.bin_runs, config.heldout_runs);
  if (!cal.ok()) return Fail(err, cal.status());
  if (auto s = WriteJson(dir / "bins.json", RiskBinTableToJson(cal->table)); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteJson(dir / "calibration.json", cal->manifest); !s.ok()) return Fail(err, s);
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  log << "fitted 15 thresholds on " << cal->fit_risks.size() << " message risks\n";
  return kExitOk;
}

absl::Status WriteSamples(const SampleSet& set, const fs::path& dir, const std::string& name,
                          bool jsonl) {
  if (auto s = WriteSamplesBinary(set, (dir / (name + ".bin")).string()); !s.ok()) return s;
  if (jsonl) {
    std::ofstream out(dir / (name + ".jsonl"), std::ios::binary);
    WriteSamplesJsonl(set, out);
  }
  return absl::OkStatus();
}

std::string RunsCsv(const GeneratedData& data) {
  std::ostringstream out;
  out << "run_id,split,samples,contacts,cases,r\n";
  for (size_t i = 0; i < data.runs.size(); ++i) {
    const RunSummary& s = data.runs[i];
    const Json& run = data.manifest["runs"][i];
    out << i << ',' << run["split"].get<std::string>() << ',' << run["samples"].get<size_t>()
        << ',' << s.mean_contacts << ',' << s.total_cases << ','
        << (s.r ? absl::StrCat(s.r->r) : "") << '\n';
  }
  return out.str();
}

int CmdGenData(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<Resources> res = LoadResources(config, UsesModel(config));
  if (!res.ok()) return Fail(err, res.status());
  absl::StatusOr<RiskBinTable> bins = config.bins.empty() && res->model != nullptr
                                          ? absl::StatusOr<RiskBinTable>(res->bins)
                                          : ResolveBins(config, dir, log);
  if (!bins.ok()) return Fail(err, bins.status());
  if (auto s = WriteJson(dir / "bins.json", RiskBinTableToJson(*bins)); !s.ok()) {
    return Fail(err, s);
  }
  GenerateConfig gen = MakeGenerateConfig(config);
  gen.driver = MethodConfig::For(config.driver == "ds-pct" ? Method::kSetNet : Method::kNoisyOracle);
  gen.driver.bins = *bins;
  gen.driver.recommendation = config.recommendation;
  gen.driver.model = res->model.get();
  absl::StatusOr<GeneratedData> data = GenerateDataset(gen);
  if (!data.ok()) return Fail(err, data.status());
  if (auto s = WriteSamples(data->train, dir, "train", config.jsonl); !s.ok()) return Fail(err, s);
  if (auto s = WriteSamples(data->val, dir, "val", config.jsonl); !s.ok()) return Fail(err, s);
  if (auto s = WriteJson(dir / "dataset.json", data->manifest); !s.ok()) return Fail(err, s);
  if (auto s = WriteFile((dir / "runs.csv").string(), RunsCsv(*data)); !s.ok()) return Fail(err, s);
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  log << "generated " << data->train.size() << " training and " << data->val.size()
      << " validation samples from " << config.runs << " runs\n";
  return kExitOk;
}

std::string CurveCsv(const TrainResult& r) {
  std::ostringstream out;
  out << "step,lr,train_mse,val_mse\n";
  for (const CurvePoint& p : r.curve) {
    out << p.step << ',' << p.lr << ',' << p.train_mse << ',' << p.val_mse << '\n';
  }
  return out.str();
}

Json TrainReport(const TrainResult& r) {
  return Json{{"best_step", r.best_step},
              {"best_val_mse", r.best_val_mse},
              {"mean_predictor_mse", r.mean_predictor_mse},
              {"steps_run", r.steps_run},
              {"early_stopped", r.early_stopped}};
}

int CmdTrain(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  const fs::path data_dir(config.data_dir);
  absl::StatusOr<SampleSet> train = ReadSamplesBinary((data_dir / "train.bin").string());
  if (!train.ok()) return Fail(err, train.status());
  absl::StatusOr<SampleSet> val = ReadSamplesBinary((data_dir / "val.bin").string());
  if (!val.ok()) return Fail(err, val.status());
  std::unique_ptr<Params<float>> init;
  if (!config.init_checkpoint.empty()) {
    absl::StatusOr<Params<float>> p = LoadParams(config.init_checkpoint);
    if (!p.ok()) return Fail(err, p.status());
    init = std::make_unique<Params<float>>(std::move(*p));
  }
  TrainConfig tc = config.train;
  tc.seed = DeriveSeed(config.seed, Stream::kTraining, {0});
  absl::StatusOr<TrainResult> result = Train(tc, train->view(), val->view(), init.get());
  if (!result.ok()) return Fail(err, result.status());
  if (auto s = SaveParams(result->best, (dir / "model.json").string()); !s.ok()) return Fail(err, s);
  if (fs::exists(data_dir / "bins.json")) {
    std::error_code ec;
    fs::copy_file(data_dir / "bins.json", dir / "bins.json", fs::copy_options::overwrite_existing, ec);
  }
  if (auto s = WriteFile((dir / "curve.csv").string(), CurveCsv(*result)); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteJson(dir / "report.json", TrainReport(*result)); !s.ok()) return Fail(err, s);
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  log << "best validation MSE " << result->best_val_mse << " at step " << result->best_step
      << " (mean predictor " << result->mean_predictor_mse << ")\n";
  return kExitOk;
}

int CmdRetrain(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<RiskBinTable> bins = ResolveBins(config, dir, log);
  if (!bins.ok()) return Fail(err, bins.status());
  RetrainConfig rc;
  rc.generate = MakeGenerateConfig(config);
  rc.generate.driver.bins = *bins;
  rc.generate.driver.recommendation = config.recommendation;
  rc.train = config.train;
  rc.iterations = config.iterations;
  rc.finetune_peak_lr = config.finetune_peak_lr;
  std::ofstream train_log(dir / "train.log");
  std::ostringstream table;
  table << "iteration,val_mse,previous_checkpoint_val_mse,mean_predictor_mse,best_step,steps_run,"
           "train_samples,val_samples\n";
  absl::Status write_status;
  auto on_iteration = [&](const RetrainIteration& it, const GeneratedData& data) {
    const std::string stem = absl::StrCat("checkpoint_", it.iteration);
    absl::Status s = SaveParams(it.checkpoint, (dir / (stem + ".json")).string());
    if (s.ok()) s = WriteFile((dir / absl::StrCat("curve_", it.iteration, ".csv")).string(),
                              CurveCsv(it.result));
    if (s.ok()) s = WriteJson(dir / absl::StrCat("dataset_", it.iteration, ".json"), data.manifest);
    if (s.ok() && config.save_data) {
      const fs::path data_dir = dir / absl::StrCat("data_", it.iteration);
      fs::create_directories(data_dir);
      s = WriteSamples(data.train, data_dir, "train", false);
      if (s.ok()) s = WriteSamples(data.val, data_dir, "val", false);
    }
    if (!s.ok() && write_status.ok()) write_status = s;
    table << it.iteration << ',' << it.val_mse << ','
          << (it.previous_val_mse ? absl::StrCat(*it.previous_val_mse) : "") << ','
          << it.result.mean_predictor_mse << ',' << it.result.best_step << ','
          << it.result.steps_run << ',' << data.train.size() << ',' << data.val.size() << '\n';
    log << "iteration " << it.iteration << ": validation MSE " << it.val_mse << '\n';
  };
  absl::StatusOr<std::vector<RetrainIteration>> iters =
      IterativeRetrain(rc, config.seed, &train_log, on_iteration);
  if (auto s = WriteFile((dir / "retrain.csv").string(), table.str()); !s.ok()) return Fail(err, s);
  if (!iters.ok()) return Fail(err, iters.status());
  if (!write_status.ok()) return Fail(err, write_status);
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  return kExitOk;
}

int CmdEvaluate(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<Resources> res = LoadResources(config, UsesModel(config));
  if (!res.ok()) return Fail(err, res.status());
  EvaluateConfig ec;
  ec.world = config.world;
  ec.base = config.scenario;
  for (const std::string& name : config.methods) {
    absl::StatusOr<MethodConfig> m = MakeMethod(name, config, *res);
    if (!m.ok()) return Fail(err, m.status());
    ec.methods.push_back(*m);
  }
  ec.seeds = RunSeeds(config.seed, config.seeds);
  ec.match_contacts = config.match_contacts;
  ec.window = {config.contacts_center, config.contacts_half_width};
  ec.resamples = config.resamples;
  ec.bootstrap_seed = DeriveSeed(config.seed, Stream::kBootstrap);
  absl::StatusOr<EvaluateResult> result = EvaluateMethods(ec);
  if (!result.ok()) return Fail(err, result.status());

  std::ostringstream runs;
  std::ofstream summaries(dir / "summaries.jsonl", std::ios::binary);
  runs << "method,mobility,seed,contacts,r,in_window,cases\n";
  for (const MethodRuns& mr : result->methods) {
    for (const RunSummary& s : mr.runs) {
      runs << mr.method << ',' << mr.mobility << ',' << s.seed << ',' << s.mean_contacts << ','
           << (s.r ? absl::StrCat(s.r->r) : "") << ',' << (ec.window.Contains(s) ? 1 : 0) << ','
           << s.total_cases << '\n';
      summaries << RunSummaryToJson(s).dump() << '\n';
    }
  }
  const MethodComparison& cmp = result->comparison;
  std::ostringstream table;
  table << "method,n,mean,median,q1,q3";
  for (const std::string& m : cmp.methods) table << ",p_vs_" << m;
  table << '\n';
  Json cj = Json::array();
  for (size_t i = 0; i < cmp.methods.size(); ++i) {
    const BootstrapSummary& b = cmp.summaries[i];
    table << cmp.methods[i] << ',' << result->methods[i].r_values.size() << ',' << b.mean << ','
          << b.median << ',' << b.q1 << ',' << b.q3;
    for (double p : cmp.p_values[i]) table << ',' << p;
    table << '\n';
    cj.push_back({{"method", cmp.methods[i]},
                  {"mobility", result->methods[i].mobility},
                  {"n", result->methods[i].r_values.size()},
                  {"mean", b.mean},
                  {"median", b.median},
                  {"q1", b.q1},
                  {"q3", b.q3},
                  {"p_values", cmp.p_values[i]}});
    log << cmp.methods[i] << ": mean R " << b.mean << " over " << result->methods[i].r_values.size()
        << " runs in window\n";
  }
  if (auto s = WriteFile((dir / "runs.csv").string(), runs.str()); !s.ok()) return Fail(err, s);
  if (auto s = WriteFile((dir / "comparison.csv").string(), table.str()); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteJson(dir / "comparison.json", cj); !s.ok()) return Fail(err, s);
  if (auto s = WriteManifest(dir, config); !s.ok()) return Fail(err, s);
  return kExitOk;
}

int CmdSweep(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  absl::StatusOr<Resources> res = LoadResources(config, UsesModel(config));
  if (!res.ok()) return Fail(err, res.status());
  SweepConfig sc;
  sc.world = config.world;
  sc.base = config.scenario;
  sc.kind = *ParseSweepKind(config.sweep_kind);
  sc.grid = config.grid;
  for (const std::string& name : config.methods) {
    absl::StatusOr<MethodConfig> m = MakeMethod(name, config, *res);
    if (!m.ok()) return Fail(err, m.status());
    sc.methods.push_back(*m);
  }
  sc.seeds = RunSeeds(config.seed, config.seeds);
  absl::StatusOr<SweepResult> result = RunSweep(sc);
  if (!result.ok()) return Fail(err, result.status());

  std::ostringstream rows;
  std::ostringstream failures;
  rows << "method,grid_value,seed_index,seed,contacts,r,error\n";
  failures << "method,grid_value,seed_index,error\n";
  for (const SweepRow& row : result->rows) {
    rows << row.point.method << ',' << row.point.grid_value << ',' << row.seed_index << ','
         << row.point.seed << ',' << row.point.contacts << ',' << OptionalR(row.point.r) << ','
         << CsvSafe(row.error) << '\n';
    if (!row.error.empty()) {
      failures << row.point.method << ',' << row.point.grid_value << ',' << row.seed_index << ','
               << CsvSafe(row.error) << '\n';
    }
  }
  std::ostringstream agg;
  agg << "method,grid_value,n,undefined,mean_contacts,mean_r,se_r\n";
  for (const GridCell& c : AggregateByGrid(result->rows)) {
    agg << c.method << ',' << c.grid_value << ',' << c.n << ',' << c.undefined << ','
        << c.mean_contacts << ',' << c.mean_r << ',' << c.se_r << '\n';
  }
  if (auto s = WriteFile((dir / "sweep_runs.csv").string(), rows.str()); !s.ok()) {
    return Fail(err, s);
  }
  if (auto s = WriteFile((dir / "sweep.csv").string(), agg.str()); !s.ok()) return Fail(err, s);
  if (sc.kind == SweepKind::kMobility) {
    std::map<std::string, std::vector<SweepPoint>> by_method;
    for (const SweepRow& row : result->rows) {
      if (row.error.empty()) by_method[row.point.method].push_back(row.point);
    }
    std::ostringstream pareto;
    pareto << "method,contacts_lo,contacts_hi,n,mean_contacts,mean_r,se_r,undefined\n";
    for (const std::string& name : config.methods) {
      const ParetoTable t = BinPoints(by_method[name]);
      for (const ParetoBin& b : t.bins) {
        pareto << name << ',' << b.lo << ',' << b.hi << ',' << b.n << ',' << b.mean_contacts << ','
               << b.mean_r << ',' << b.se_r << ',' << t.undefined_runs << '\n';
      }
    }
    if (auto s = WriteFile((dir / "pareto.csv").string(), pareto.str()); !s.ok()) {
      return Fail(err, s);
    }
  }
  if (result->failures > 0) {
    if (auto s = WriteFile((dir / "failures.csv").string(), failures.str()); !s.ok()) {
      return Fail(err, s);
    }
  }
  if (auto s = WriteManifest(dir, config, {{"failures", result->failures}}); !s.ok()) {
    return Fail(err, s);
  }
  log << result->rows.size() << " runs, " << result->failures << " failed\n";
  if (result->failures > 0) {
    err << "sweep finished with " << result->failures << " failed runs (see failures.csv)\n"
        << failures.str();
    return kExitPartial;
  }
  return kExitOk;
}

absl::StatusOr<std::vector<SweepRow>> ReadSweepRows(const fs::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path.string());
  if (!text.ok()) return text.status();
  std::vector<SweepRow> rows;
  bool header = true;
  for (absl::string_view line : absl::StrSplit(*text, '\n', absl::SkipEmpty())) {
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f = absl::StrSplit(line, ',');
    if (f.size() != 7) return absl::InvalidArgumentError(absl::StrCat(path.string(), ": bad row"));
    SweepRow row;
    row.point.method = f[0];
    row.point.grid_value = std::stod(f[1]);
    row.seed_index = std::stoi(f[2]);
    row.point.seed = std::stoull(f[3]);
    row.point.contacts = std::stod(f[4]);
    if (!f[5].empty()) row.point.r = std::stod(f[5]);
    row.error = f[6];
    rows.push_back(row);
  }
  return rows;
}

absl::StatusOr<std::vector<RunSummary>> ReadSummaries(const fs::path& input) {
  std::vector<RunSummary> runs;
  std::vector<Json> docs;
  if (fs::exists(input / "summary.json")) {
    absl::StatusOr<std::string> text = ReadFile((input / "summary.json").string());
    if (!text.ok()) return text.status();
    absl::StatusOr<Json> j = ParseJson(*text, "summary.json");
    if (!j.ok()) return j.status();
    docs.push_back(*j);
  } else {
    absl::StatusOr<std::string> text = ReadFile((input / "summaries.jsonl").string());
    if (!text.ok()) return text.status();
    for (absl::string_view line : absl::StrSplit(*text, '\n', absl::SkipEmpty())) {
      absl::StatusOr<Json> j = ParseJson(line, "summaries.jsonl");
      if (!j.ok()) return j.status();
      docs.push_back(*j);
    }
  }
  for (const Json& j : docs) {
    absl::StatusOr<RunSummary> s = RunSummaryFromJson(j);
    if (!s.ok()) return s.status();
    runs.push_back(std::move(*s));
  }
  return runs;
}

int CmdPlot(const RunConfig& config, const fs::path& dir, std::ostream& log, std::ostream& err) {
  const fs::path input(config.input_dir);
  absl::Status s;
  if (config.figure == "pareto" || config.figure == "adoption") {
    absl::StatusOr<std::vector<SweepRow>> rows = ReadSweepRows(input / "sweep_runs.csv");
    if (!rows.ok()) return Fail(err, rows.status());
    if (config.figure == "pareto") {
      std::vector<std::pair<std::string, ParetoTable>> tables;
      std::map<std::string, std::vector<SweepPoint>> by_method;
      std::vector<std::string> order;
      for (const SweepRow& row : *rows) {
        if (!row.error.empty()) continue;
        if (!by_method.contains(row.point.method)) order.push_back(row.point.method);
        by_method[row.point.method].push_back(row.point);
      }
      for (const std::string& m : order) tables.emplace_back(m, BinPoints(by_method[m]));
      s = WriteParetoPlot(dir, tables);
    } else {
      std::map<std::string, ErrorBarSeries> series;
      std::vector<std::string> order;
      for (const GridCell& c : AggregateByGrid(*rows)) {
        if (!series.contains(c.method)) order.push_back(c.method);
        series[c.method].name = c.method;
        series[c.method].points.push_back({c.grid_value * 100.0, c.mean_r, c.se_r});
      }
      std::vector<ErrorBarSeries> list;
      for (const std::string& m : order) list.push_back(series[m]);
      s = WriteErrorBarPlot(dir, "adoption", "adoption (%)", "R", list);
    }
  } else if (config.figure == "cases" || config.figure == "quarantine") {
    absl::StatusOr<std::vector<RunSummary>> runs = ReadSummaries(input);
    if (!runs.ok()) return Fail(err, runs.status());
    s = WriteSeriesPlot(dir, *runs, config.figure == "quarantine");
  } else {
    absl::StatusOr<std::string> text = ReadFile((input / "comparison.json").string());
    if (!text.ok()) return Fail(err, text.status());
    absl::StatusOr<Json> j = ParseJson(*text, "comparison.json");
    if (!j.ok()) return Fail(err, j.status());
    std::vector<std::string> names;
    std::vector<BootstrapSummary> boxes;
    for (const Json& m : *j) {
      names.push_back(m.at("method").get<std::string>());
      BootstrapSummary b;
      b.mean = m.at("mean").get<double>();
      b.median = m.at("median").get<double>();
      b.q1 = m.at("q1").get<double>();
      b.q3 = m.at("q3").get<double>();
      boxes.push_back(b);
    }
    s = WriteBoxPlot(dir, "comparison", "bootstrapped mean R", names, boxes);
  }
  if (!s.ok()) return Fail(err, s);
  if (auto m = WriteManifest(dir, config); !m.ok()) return Fail(err, m);
  log << "wrote " << config.figure << " plot files to " << dir.string() << '\n';
  return kExitOk;
}

std::string ConfigPathFromArgv(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

void AddCommon(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "JSON config file applied before flags");
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out_root, "output root")->capture_default_str();
  sub->add_option("--run-dir", c.run_dir, "exact output directory (overrides the layout)");
  sub->add_option("--agents", c.world.num_agents, "population size")->capture_default_str();
  sub->add_option("--days", c.world.horizon_days, "horizon in days")->capture_default_str();
}

void AddScenario(CLI::App* sub, RunConfig& c) {
  sub->add_option("--mobility", c.scenario.mobility_factor, "global mobility factor")
      ->capture_default_str();
  sub->add_option("--adoption", c.scenario.adoption_rate, "app adoption (population fraction)")
      ->capture_default_str();
  sub->add_option("--beta", c.scenario.transmission_scale, "transmission scale")
      ->capture_default_str();
}

void AddModelInputs(CLI::App* sub, RunConfig& c) {
  sub->add_option("--checkpoint", c.checkpoint, "setnet parameter file (ds-pct)");
  sub->add_option("--bins", c.bins, "risk-bin threshold JSON (15 values)");
}

}  // namespace

fs::path RunDirectory(const RunConfig& config) {
  if (!config.run_dir.empty()) return config.run_dir;
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &tm);
  return fs::path(config.out_root) / config.subcommand /
         absl::StrCat(stamp, "-", ConfigHash(config).substr(0, 8));
}

int RunCommand(const RunConfig& config, std::ostream& log, std::ostream& err) {
  if (auto s = ValidateRunConfig(config); !s.ok()) return Fail(err, s);
  const fs::path dir = RunDirectory(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return Fail(err, absl::UnavailableError(absl::StrCat("cannot create ", dir.string())));
  const std::string& cmd = config.subcommand;
  if (cmd == "simulate") return CmdSimulate(config, dir, log, err);
  if (cmd == "bins") return CmdBins(config, dir, log, err);
  if (cmd == "gen-data") return CmdGenData(config, dir, log, err);
  if (cmd == "train") return CmdTrain(config, dir, log, err);
  if (cmd == "retrain") return CmdRetrain(config, dir, log, err);
  if (cmd == "evaluate") return CmdEvaluate(config, dir, log, err);
  if (cmd == "sweep") return CmdSweep(config, dir, log, err);
  return CmdPlot(config, dir, log, err);
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* threads = std::getenv("PCT_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) omp_set_num_threads(n);
  }
  RunConfig config;
  const std::string config_file = ConfigPathFromArgv(argc, argv);
  if (!config_file.empty()) {
    absl::StatusOr<std::string> text = ReadFile(config_file);
    if (!text.ok()) return Fail(err, text.status());
    absl::StatusOr<RunConfig> parsed = RunConfigFromText(*text, config_file);
    if (!parsed.ok()) return Fail(err, parsed.status());
    config = *parsed;
  }
  std::string config_path;
  CLI::App app{"Proactive contact tracing simulator and training pipeline"};
  app.require_subcommand(1, 1);

  CLI::App* sim = app.add_subcommand("simulate", "run one simulation and write its event log");
  AddCommon(sim, config, config_path);
  AddScenario(sim, config);
  AddModelInputs(sim, config);
  sim->add_option("--method", config.method, "nt, bct, heuristic, oracle or ds-pct")
      ->capture_default_str();
  sim->add_flag("--trace-messages", config.trace_messages, "write messages.jsonl");

  CLI::App* bins = app.add_subcommand("bins", "fit risk-bin thresholds on noisy-oracle runs");
  AddCommon(bins, config, config_path);
  bins->add_option("--runs", config.bin_runs, "calibration runs")->capture_default_str();
  bins->add_option("--heldout-runs", config.heldout_runs, "extra runs to measure bin masses")
      ->capture_default_str();

  CLI::App* gen = app.add_subcommand("gen-data", "generate a domain-randomized training dataset");
  AddCommon(gen, config, config_path);
  AddModelInputs(gen, config);
  gen->add_option("--runs", config.runs, "simulation runs")->capture_default_str();
  gen->add_option("--bin-runs", config.bin_runs, "calibration runs when --bins is absent")
      ->capture_default_str();
  gen->add_option("--driver", config.driver, "oracle or ds-pct")->capture_default_str();
  gen->add_flag("--jsonl", config.jsonl, "also write JSONL samples");

  CLI::App* train = app.add_subcommand("train", "train the set network on a dataset");
  AddCommon(train, config, config_path);
  train->add_option("--data", config.data_dir, "gen-data output directory");
  train->add_option("--init", config.init_checkpoint, "checkpoint to fine-tune");
  train->add_option("--steps", config.train.max_steps, "optimizer steps (0: warmup + cosine)")
      ->capture_default_str();
  train->add_option("--batch", config.train.batch_size, "batch size")->capture_default_str();

  CLI::App* retrain = app.add_subcommand("retrain", "iterative retraining loop");
  AddCommon(retrain, config, config_path);
  retrain->add_option("--bins", config.bins, "risk-bin threshold JSON (calibrated when absent)");
  retrain->add_option("--iterations", config.iterations, "iterations")->capture_default_str();
  retrain->add_option("--runs", config.runs, "simulation runs per iteration")->capture_default_str();
  retrain->add_option("--bin-runs", config.bin_runs, "calibration runs when --bins is absent")
      ->capture_default_str();
  retrain->add_option("--steps", config.train.max_steps, "optimizer steps per iteration")
      ->capture_default_str();
  retrain->add_flag("--save-data", config.save_data, "keep each iteration's dataset");

  CLI::App* eval = app.add_subcommand("evaluate", "compare methods at matched contacts");
  AddCommon(eval, config, config_path);
  AddScenario(eval, config);
  AddModelInputs(eval, config);
  eval->add_option("--methods", config.methods, "comma-separated methods")->delimiter(',');
  eval->add_option("--seeds", config.seeds, "runs per method")->capture_default_str();
  eval->add_option("--resamples", config.resamples, "bootstrap resamples")->capture_default_str();
  eval->add_flag("--match-contacts,!--no-match-contacts", config.match_contacts,
                 "calibrate mobility per method and filter by the contacts window");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep mobility or adoption");
  AddCommon(sweep, config, config_path);
  AddScenario(sweep, config);
  AddModelInputs(sweep, config);
  sweep->add_option("--kind", config.sweep_kind, "mobility or adoption")->capture_default_str();
  sweep->add_option("--grid", config.grid, "comma-separated grid values")->delimiter(',');
  sweep->add_option("--methods", config.methods, "comma-separated methods")->delimiter(',');
  sweep->add_option("--seeds", config.seeds, "seeds per grid value")->capture_default_str();

  CLI::App* plot = app.add_subcommand("plot", "write gnuplot data and scripts");
  AddCommon(plot, config, config_path);
  plot->add_option("--figure", config.figure, "pareto, adoption, cases, quarantine, comparison");
  plot->add_option("--input", config.input_dir, "directory produced by sweep, evaluate or simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  for (CLI::App* sub : app.get_subcommands()) config.subcommand = sub->get_name();
  return RunCommand(config, out, err);
}

}  // namespace pct
