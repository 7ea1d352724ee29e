#include "pct/pipeline/experiments.h"

#include <cmath>
#include <map>
#include <optional>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"
#include "pct/pipeline/calibrate.h"

namespace pct {

std::vector<uint64_t> RunSeeds(uint64_t master, int count) {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < count; ++i) {
    seeds.push_back(DeriveSeed(master, Stream::kRun, {static_cast<uint64_t>(i)}));
  }
  return seeds;
}

absl::StatusOr<EvaluateResult> EvaluateMethods(const EvaluateConfig& config) {
  if (config.methods.empty()) return absl::InvalidArgumentError("no methods to evaluate");
  if (config.seeds.empty()) return absl::InvalidArgumentError("no seeds");
  EvaluateResult result;
  std::vector<std::pair<std::string, std::vector<double>>> r_by_method;
  for (const MethodConfig& method : config.methods) {
    MethodRuns mr;
    mr.method = std::string(MethodName(method.method));
    ScenarioParams base = config.base;
    if (config.match_contacts) {
      const size_t n_cal = std::min<size_t>(std::max(config.calibration_seeds, 1), config.seeds.size());
      absl::StatusOr<MobilityCalibration> cal = CalibrateMobility(
          config.world, base, method, config.window.center,
          std::span<const uint64_t>(config.seeds.data(), n_cal), 0.1, 2.0, config.bisection_steps);
      if (!cal.ok()) return cal.status();
      base.mobility_factor = cal->mobility;
    }
    mr.mobility = base.mobility_factor;
    std::vector<std::optional<absl::StatusOr<RunOutput>>> outputs(config.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (size_t i = 0; i < config.seeds.size(); ++i) {
      ScenarioParams p = base;
      p.seed = config.seeds[i];
      outputs[i] = RunSimulation(config.world, p, method);
    }
    for (auto& out : outputs) {
      if (!out->ok()) return out->status();
      RunSummary& s = (*out)->summary;
      if (s.r.has_value() && (!config.match_contacts || config.window.Contains(s))) {
        mr.r_values.push_back(s.r->r);
      }
      mr.runs.push_back(std::move(s));
    }
    r_by_method.emplace_back(mr.method, mr.r_values);
    result.methods.push_back(std::move(mr));
  }
  absl::StatusOr<MethodComparison> cmp =
      BootstrapCompare(r_by_method, config.resamples, config.bootstrap_seed);
  if (!cmp.ok()) return cmp.status();
  result.comparison = std::move(*cmp);
  return result;
}

absl::StatusOr<SweepKind> ParseSweepKind(absl::string_view name) {
  if (name == "mobility") return SweepKind::kMobility;
  if (name == "adoption") return SweepKind::kAdoption;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sweep kind '", name, "' (expected mobility or adoption)"));
}

absl::StatusOr<SweepResult> RunSweep(const SweepConfig& config) {
  if (config.grid.empty()) return absl::InvalidArgumentError("sweep grid is empty");
  if (config.methods.empty()) return absl::InvalidArgumentError("no methods to sweep");
  if (config.seeds.empty()) return absl::InvalidArgumentError("no seeds");
  for (const MethodConfig& m : config.methods) {
    if (auto s = m.Validate(); !s.ok()) return s;
  }
  const size_t per_method = config.grid.size() * config.seeds.size();
  const size_t total = config.methods.size() * per_method;
  SweepResult result;
  result.rows.resize(total);
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t idx = 0; idx < total; ++idx) {
    const MethodConfig& method = config.methods[idx / per_method];
    const size_t g = (idx % per_method) / config.seeds.size();
    const size_t s = idx % config.seeds.size();
    ScenarioParams p = config.base;
    p.seed = config.seeds[s];
    if (config.kind == SweepKind::kMobility) {
      p.mobility_factor = config.grid[g];
    } else {
      p.adoption_rate = config.grid[g];
    }
    SweepRow& row = result.rows[idx];
    row.seed_index = static_cast<int>(s);
    row.point.method = std::string(MethodName(method.method));
    row.point.grid_value = config.grid[g];
    row.point.seed = p.seed;
    if (auto v = p.Validate(); !v.ok()) {
      row.error = std::string(v.message());
      continue;
    }
    absl::StatusOr<RunOutput> out = RunSimulation(config.world, p, method);
    if (!out.ok()) {
      row.error = std::string(out.status().message());
      continue;
    }
    row.point.contacts = out->summary.mean_contacts;
    if (out->summary.r.has_value()) row.point.r = out->summary.r->r;
  }
  for (const SweepRow& row : result.rows) result.failures += row.error.empty() ? 0 : 1;
  return result;
}

std::vector<GridCell> AggregateByGrid(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<const SweepRow*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const SweepRow& row : rows) {
    auto key = std::make_pair(row.point.method, row.point.grid_value);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&row);
  }
  std::vector<GridCell> cells;
  for (const auto& key : order) {
    GridCell cell;
    cell.method = key.first;
    cell.grid_value = key.second;
    std::vector<double> rs;
    double contacts = 0.0;
    int ok_runs = 0;
    for (const SweepRow* row : groups[key]) {
      if (!row->error.empty()) continue;
      ++ok_runs;
      contacts += row->point.contacts;
      if (row->point.r.has_value()) {
        rs.push_back(*row->point.r);
      } else {
        ++cell.undefined;
      }
    }
    cell.n = static_cast<int>(rs.size());
    if (ok_runs > 0) cell.mean_contacts = contacts / ok_runs;
    if (!rs.empty()) {
      for (double r : rs) cell.mean_r += r;
      cell.mean_r /= cell.n;
    }
    if (cell.n > 1) {
      double ss = 0.0;
      for (double r : rs) ss += (r - cell.mean_r) * (r - cell.mean_r);
      cell.se_r = std::sqrt(ss / (cell.n - 1) / cell.n);
    }
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace pct
