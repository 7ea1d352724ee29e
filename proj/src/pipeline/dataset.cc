#include "pct/pipeline/dataset.h"

#include <cstring>
#include <fstream>
#include <optional>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"

namespace pct {
namespace {

constexpr char kMagic[8] = {'P', 'C', 'T', 'D', 'S', '0', '0', '1'};

template <typename T>
void Put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool Get(std::istream& in, T* v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(v), sizeof(T)));
}

}  // namespace

void SampleSet::Append(RunOutput&& run) {
  inputs.insert(inputs.end(), std::make_move_iterator(run.inputs.begin()),
                std::make_move_iterator(run.inputs.end()));
  targets.insert(targets.end(), run.targets.begin(), run.targets.end());
  meta.insert(meta.end(), run.meta.begin(), run.meta.end());
}

absl::Status WriteSamplesBinary(const SampleSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out.write(kMagic, sizeof(kMagic));
  Put(out, static_cast<uint64_t>(set.size()));
  for (size_t i = 0; i < set.size(); ++i) {
    const SetInput& in = set.inputs[i];
    Put(out, set.meta[i].run_id);
    Put(out, set.meta[i].agent);
    Put(out, set.meta[i].day);
    for (float t : set.targets[i]) Put(out, t);
    for (uint16_t s : in.statuses) Put(out, s);
    Put(out, in.age);
    Put(out, in.sex);
    Put(out, in.conditions);
    Put(out, static_cast<uint32_t>(in.clusters.size()));
    for (const Cluster& c : in.clusters) {
      Put(out, static_cast<uint8_t>(c.day_offset));
      Put(out, static_cast<uint8_t>(c.risk_level));
      Put(out, static_cast<uint32_t>(c.count));
    }
  }
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<SampleSet> ReadSamplesBinary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    return absl::DataLossError(absl::StrCat(path, ": not a sample file"));
  }
  uint64_t count = 0;
  if (!Get(in, &count)) return absl::DataLossError(absl::StrCat(path, ": truncated header"));
  SampleSet set;
  set.inputs.resize(count);
  set.targets.resize(count);
  set.meta.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    SetInput& s = set.inputs[i];
    bool ok = Get(in, &set.meta[i].run_id) && Get(in, &set.meta[i].agent) &&
              Get(in, &set.meta[i].day);
    for (float& t : set.targets[i]) ok = ok && Get(in, &t);
    for (uint16_t& st : s.statuses) ok = ok && Get(in, &st);
    uint32_t clusters = 0;
    ok = ok && Get(in, &s.age) && Get(in, &s.sex) && Get(in, &s.conditions) && Get(in, &clusters);
    if (!ok || clusters > 16 * kWindowDays) {
      return absl::DataLossError(absl::StrCat(path, ": corrupt sample ", i));
    }
    s.clusters.resize(clusters);
    for (Cluster& c : s.clusters) {
      uint8_t offset = 0;
      uint8_t level = 0;
      uint32_t n = 0;
      if (!Get(in, &offset) || !Get(in, &level) || !Get(in, &n)) {
        return absl::DataLossError(absl::StrCat(path, ": corrupt sample ", i));
      }
      c = {offset, level, static_cast<int>(n)};
    }
  }
  return set;
}

Json SampleToJson(const SetInput& input, const Target& target, const SampleMeta& meta) {
  Json clusters = Json::array();
  for (const Cluster& c : input.clusters) {
    clusters.push_back({c.day_offset, c.risk_level, c.count});
  }
  return Json{{"run_id", meta.run_id},  {"agent", meta.agent},
              {"day", meta.day},        {"statuses", input.statuses},
              {"age", input.age},       {"sex", input.sex},
              {"conditions", input.conditions}, {"clusters", clusters},
              {"target", target}};
}

void WriteSamplesJsonl(const SampleSet& set, std::ostream& out) {
  for (size_t i = 0; i < set.size(); ++i) {
    out << SampleToJson(set.inputs[i], set.targets[i], set.meta[i]).dump() << '\n';
  }
}

ScenarioParams RunScenario(const GenerateConfig& config, int run_id) {
  Rng rng = MakeRng(config.seed, Stream::kScenario, {static_cast<uint64_t>(run_id)});
  return SampleScenario(rng, config.base_scenario, config.ranges);
}

absl::StatusOr<GeneratedData> GenerateDataset(const GenerateConfig& config) {
  if (config.num_runs < 1) return absl::InvalidArgumentError("num_runs must be >= 1");
  if (config.driver.method != Method::kNoisyOracle && config.driver.method != Method::kSetNet) {
    return absl::InvalidArgumentError("dataset driver must be oracle or ds-pct");
  }
  if (auto s = config.driver.Validate(); !s.ok()) return s;
  if (auto s = config.world.Validate(); !s.ok()) return s;

  std::vector<std::optional<absl::StatusOr<RunOutput>>> outputs(config.num_runs);
  RunOptions options;
  options.collect_samples = true;
#pragma omp parallel for schedule(dynamic, 1)
  for (int run = 0; run < config.num_runs; ++run) {
    outputs[run] = RunSimulation(config.world, RunScenario(config, run), config.driver, options, run);
  }

  GeneratedData data;
  Json runs = Json::array();
  for (int run = 0; run < config.num_runs; ++run) {
    absl::StatusOr<RunOutput>& r = *outputs[run];
    if (!r.ok()) {
      return absl::Status(r.status().code(), absl::StrCat("run ", run, ": ", r.status().message()));
    }
    const bool val = IsValidationRun(run);
    runs.push_back({{"run_id", run},
                    {"split", val ? "val" : "train"},
                    {"samples", r->inputs.size()},
                    {"scenario", r->summary.scenario}});
    data.runs.push_back(r->summary);
    (val ? data.val : data.train).Append(std::move(*r));
    outputs[run].reset();
  }
  Json config_json{{"world", WorldConfigToJson(config.world)},
                   {"base_scenario", ScenarioToJson(config.base_scenario)},
                   {"num_runs", config.num_runs},
                   {"seed", config.seed},
                   {"driver", MethodName(config.driver.method)},
                   {"bins", RiskBinTableToJson(config.driver.bins)}};
  if (config.driver.model != nullptr) {
    // Fingerprint of the driving checkpoint's raw parameters.
    const auto& values = config.driver.model->data();
    config_json["model_hash"] = Fnv1aHex(absl::string_view(
        reinterpret_cast<const char*>(values.data()), values.size() * sizeof(float)));
  }
  data.manifest = Json{{"format", "pct-dataset"},
                       {"version", 1},
                       {"config", config_json},
                       {"config_hash", Fnv1aHex(config_json.dump())},
                       {"train_samples", data.train.size()},
                       {"val_samples", data.val.size()},
                       {"runs", runs}};
  return data;
}

}  // namespace pct
