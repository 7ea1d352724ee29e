#include "pct/pipeline/runner.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"
#include "pct/epi/world.h"
#include "pct/setnet/model.h"
#include "pct/tracing/network.h"
#include "pct/tracing/observables.h"

namespace pct {
namespace {

constexpr absl::string_view kMethodNames[] = {"nt", "bct", "heuristic", "oracle", "ds-pct"};

bool IsPredictive(Method m) {
  return m == Method::kHeuristic || m == Method::kNoisyOracle || m == Method::kSetNet;
}

History TrueHistory(const World& world, AgentId id, Day today) {
  History h{};
  for (int k = 0; k < kWindowDays && today - k >= 0; ++k) {
    h[k] = world.GroundTruthInfectiousness(id, today - k);
  }
  return h;
}

// Yesterday's prediction re-indexed to today's offsets; offset 0 has no
// previous value and takes today's so no update is sent for it.
History AlignPrevious(const History& previous, const History& next) {
  History aligned{};
  aligned[0] = next[0];
  for (int k = 1; k < kWindowDays; ++k) aligned[k] = previous[k - 1];
  return aligned;
}

}  // namespace

absl::StatusOr<Method> ParseMethod(absl::string_view name) {
  for (size_t i = 0; i < std::size(kMethodNames); ++i) {
    if (name == kMethodNames[i]) return static_cast<Method>(i);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown method '", name, "' (expected nt, bct, heuristic, oracle, ds-pct)"));
}

absl::string_view MethodName(Method method) { return kMethodNames[static_cast<int>(method)]; }

absl::Status MethodConfig::Validate() const {
  if (method == Method::kSetNet && model == nullptr) {
    return absl::InvalidArgumentError("checkpoint required for method ds-pct");
  }
  if (auto s = recommendation.Validate(); !s.ok()) return s;
  return heuristic.Validate();
}

absl::StatusOr<RunOutput> RunSimulation(const WorldConfig& config, const ScenarioParams& params,
                                        const MethodConfig& method, const RunOptions& options,
                                        int32_t run_id) {
  if (auto s = method.Validate(); !s.ok()) return s;
  absl::StatusOr<World> created = World::Create(config, params, params.seed);
  if (!created.ok()) return created.status();
  World& world = *created;
  world.set_event_log(options.event_log);

  const int n = world.num_agents();
  std::vector<uint8_t> app_user(n, 0);
  std::vector<AgentId> app_ids;
  for (AgentId id = 0; id < n; ++id) {
    if (world.profile(id).has_app) {
      app_user[id] = 1;
      app_ids.push_back(id);
    }
  }
  TracingNetwork network(app_user, DeriveSeed(params.seed, Stream::kRun, {0}));
  network.set_trace(options.message_trace);
  Rng predictor_rng = MakeRng(params.seed, Stream::kPredictor, {0});
  SetNetEngine<float> engine;

  RunOutput out;
  RunSummary& summary = out.summary;
  summary.method = std::string(MethodName(method.method));
  summary.scenario = ScenarioToJson(params);
  summary.seed = params.seed;
  summary.num_agents = n;
  summary.num_app_users = static_cast<int>(app_ids.size());

  std::vector<History> previous(n, History{});
  std::vector<History> predicted(app_ids.size());
  std::vector<SetInput> inputs(app_ids.size());
  std::vector<const SetInput*> input_ptrs(app_ids.size());
  int cumulative = static_cast<int>(world.initial_exposed().size());
  double contacts_sum = 0.0;

  for (Day d = 0; d < config.horizon_days; ++d) {
    DayReport report = world.StepDay();
    DaySeries day;
    day.day = d;
    day.new_cases = static_cast<int>(report.infections.size());
    cumulative += day.new_cases;
    day.cumulative_cases = cumulative;
    day.contacts_per_agent = report.contacts_per_agent;
    day.compartments = report.compartment_counts;
    day.level_counts = report.level_counts;
    day.false_quarantine = n > 0 ? static_cast<double>(report.false_quarantined) / n : 0.0;
    summary.series.push_back(day);
    contacts_sum += report.contacts_per_agent;

    if (method.method == Method::kNoTracing && !options.collect_samples) continue;
    network.BeginTick(d);
    network.RecordContacts(d, report.contacts);

    if (method.method == Method::kBinary) {
      for (AgentId id : report.positive_results) {
        if (app_user[id]) network.SendPositiveNotices(id, d);
      }
      network.Route(d);
      for (AgentId id : app_ids) {
        if (auto s = world.SetRecommendation(id, BinaryTracingLevel(network.last_notice_day(id), d + 1));
            !s.ok()) {
          return s;
        }
      }
    }

    const bool predictive = IsPredictive(method.method);
    if (!predictive && !options.collect_samples) continue;

    for (size_t i = 0; i < app_ids.size(); ++i) {
      const AgentId id = app_ids[i];
      Observables obs = BuildObservables(world, id, d, network.Clusters(id, d));
      switch (method.method) {
        case Method::kHeuristic:
          predicted[i] = PredictHeuristic(obs, method.heuristic);
          break;
        case Method::kNoisyOracle: {
          absl::StatusOr<History> h = PredictNoisyOracle(
              TrueHistory(world, id, d), params.oracle_add_noise, params.oracle_mul_noise,
              predictor_rng);
          if (!h.ok()) return h.status();
          predicted[i] = *h;
          break;
        }
        default:
          break;
      }
      if (method.method == Method::kSetNet || options.collect_samples) {
        inputs[i] = EncodeObservables(obs);
      }
      if (options.collect_samples) {
        const History truth = TrueHistory(world, id, d);
        Target t;
        for (int k = 0; k < kWindowDays; ++k) t[k] = static_cast<float>(truth[k]);
        out.inputs.push_back(inputs[i]);
        out.targets.push_back(t);
        out.meta.push_back({run_id, id, d});
      }
    }
    if (method.method == Method::kSetNet) {
      for (size_t i = 0; i < inputs.size(); ++i) input_ptrs[i] = &inputs[i];
      engine.Predict(*method.model, input_ptrs, predicted);
    }
    if (!predictive) continue;

    for (size_t i = 0; i < app_ids.size(); ++i) {
      const AgentId id = app_ids[i];
      const History& next = predicted[i];
      const RiskLevel level = method.bins.Level(next[0]);
      if (options.collect_message_risks) {
        for (const ContactLog::Entry& e : network.contact_log(id).On(d)) {
          out.message_risks.insert(out.message_risks.end(), e.count, next[0]);
        }
      }
      network.SendEncounterMessages(id, d, level, d);
      const History aligned = AlignPrevious(previous[id], next);
      network.Send(BuildUpdateMessages(network.contact_log(id), d, aligned, next, method.bins));
      previous[id] = next;
      absl::StatusOr<int> rec = Recommend(next[0], method.recommendation);
      if (!rec.ok()) {
        return absl::InternalError(
            absl::StrCat("agent ", id, " day ", d, ": ", rec.status().message()));
      }
      if (auto s = world.SetRecommendation(id, *rec); !s.ok()) return s;
    }
    network.Route(d);
  }

  summary.mean_contacts = config.horizon_days > 0 ? contacts_sum / config.horizon_days : 0.0;
  summary.total_cases = cumulative;
  summary.messages_routed = network.messages_routed();
  summary.protocol_anomalies = network.anomalies();

  out.tree.roots = world.initial_exposed();
  out.tree.edges = world.infections();
  std::vector<Compartment> final_state(n);
  for (AgentId id = 0; id < n; ++id) final_state[id] = world.compartment(id);
  if (absl::StatusOr<REstimate> r = EstimateR(out.tree, final_state); r.ok()) summary.r = *r;
  return out;
}

}  // namespace pct
