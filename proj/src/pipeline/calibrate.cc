#include "pct/pipeline/calibrate.h"

#include <optional>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"

namespace pct {
namespace {

absl::StatusOr<std::vector<std::vector<double>>> CollectRisks(const GenerateConfig& config,
                                                              int first_run, int num_runs) {
  std::vector<std::optional<absl::StatusOr<RunOutput>>> outputs(num_runs);
  MethodConfig oracle = config.driver;
  oracle.method = Method::kNoisyOracle;
  RunOptions options;
  options.collect_message_risks = true;
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < num_runs; ++j) {
    Rng rng = MakeRng(config.seed, Stream::kCalibration, {static_cast<uint64_t>(first_run + j)});
    outputs[j] = RunSimulation(config.world, SampleScenario(rng, config.base_scenario, config.ranges),
                               oracle, options, first_run + j);
  }
  std::vector<std::vector<double>> risks;
  for (auto& r : outputs) {
    if (!r->ok()) return r->status();
    risks.push_back(std::move((*r)->message_risks));
  }
  return risks;
}

}  // namespace

absl::StatusOr<BinCalibration> CalibrateBins(const GenerateConfig& config, int fit_runs,
                                             int heldout_runs) {
  if (fit_runs < 1 || heldout_runs < 0) {
    return absl::InvalidArgumentError("need fit_runs >= 1 and heldout_runs >= 0");
  }
  absl::StatusOr<std::vector<std::vector<double>>> risks =
      CollectRisks(config, 0, fit_runs + heldout_runs);
  if (!risks.ok()) return risks.status();
  BinCalibration cal;
  for (int j = 0; j < fit_runs + heldout_runs; ++j) {
    std::vector<double>& dst = j < fit_runs ? cal.fit_risks : cal.heldout_risks;
    dst.insert(dst.end(), (*risks)[j].begin(), (*risks)[j].end());
  }
  absl::StatusOr<RiskBinTable> table = FitBins(cal.fit_risks);
  if (!table.ok()) return table.status();
  cal.table = *table;
  if (!cal.heldout_risks.empty()) cal.heldout_mass = BinMasses(cal.table, cal.heldout_risks);
  Json config_json{{"world", WorldConfigToJson(config.world)},
                   {"base_scenario", ScenarioToJson(config.base_scenario)},
                   {"seed", config.seed},
                   {"fit_runs", fit_runs},
                   {"heldout_runs", heldout_runs}};
  cal.manifest = Json{{"config", config_json},
                      {"config_hash", Fnv1aHex(config_json.dump())},
                      {"fit_messages", cal.fit_risks.size()},
                      {"heldout_messages", cal.heldout_risks.size()},
                      {"heldout_mass", cal.heldout_mass},
                      {"thresholds", RiskBinTableToJson(cal.table)}};
  return cal;
}

absl::StatusOr<double> MeanContacts(const WorldConfig& world, const ScenarioParams& base,
                                    const MethodConfig& method, std::span<const uint64_t> seeds) {
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds");
  std::vector<std::optional<absl::StatusOr<RunOutput>>> outputs(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t i = 0; i < seeds.size(); ++i) {
    ScenarioParams p = base;
    p.seed = seeds[i];
    outputs[i] = RunSimulation(world, p, method);
  }
  double sum = 0.0;
  for (auto& r : outputs) {
    if (!r->ok()) return r->status();
    sum += (*r)->summary.mean_contacts;
  }
  return sum / static_cast<double>(seeds.size());
}

absl::StatusOr<MobilityCalibration> CalibrateMobility(const WorldConfig& world,
                                                      const ScenarioParams& base,
                                                      const MethodConfig& method,
                                                      double target_contacts,
                                                      std::span<const uint64_t> seeds, double lo,
                                                      double hi, int iterations) {
  if (!(lo < hi) || iterations < 1) return absl::InvalidArgumentError("bad bisection interval");
  MobilityCalibration best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    ScenarioParams p = base;
    p.mobility_factor = mid;
    absl::StatusOr<double> contacts = MeanContacts(world, p, method, seeds);
    if (!contacts.ok()) return contacts.status();
    ++best.evaluations;
    if (std::abs(*contacts - target_contacts) < best_gap) {
      best_gap = std::abs(*contacts - target_contacts);
      best.mobility = mid;
      best.contacts = *contacts;
    }
    (*contacts < target_contacts ? lo : hi) = mid;
  }
  return best;
}

}  // namespace pct
