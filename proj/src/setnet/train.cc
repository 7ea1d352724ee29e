#include "pct/setnet/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"
#include "pct/setnet/model.h"

namespace pct {
namespace {

struct PointerView {
  std::vector<const SetInput*> inputs;
  std::vector<const float*> targets;
};

PointerView Pointers(SampleView view, std::span<const size_t> indices) {
  PointerView p;
  p.inputs.reserve(indices.size());
  p.targets.reserve(indices.size());
  for (size_t i : indices) {
    p.inputs.push_back(&view.inputs[i]);
    p.targets.push_back(view.targets[i].data());
  }
  return p;
}

std::vector<size_t> Iota(size_t n) {
  std::vector<size_t> v(n);
  std::iota(v.begin(), v.end(), size_t{0});
  return v;
}

}  // namespace

absl::Status TrainConfig::Validate() const {
  if (absl::Status s = net.Validate(); !s.ok()) return s;
  auto fail = [](absl::string_view key, absl::string_view msg) {
    return absl::InvalidArgumentError(absl::StrCat("train.", key, ": ", msg));
  };
  if (batch_size <= 0) return fail("batch_size", "must be positive");
  if (schedule.peak < 0 || schedule.floor < 0) return fail("lr", "must be >= 0");
  if (schedule.warmup_steps < 0 || schedule.cosine_steps < 0) {
    return fail("schedule", "step counts must be >= 0");
  }
  if (max_steps < 0) return fail("max_steps", "must be >= 0");
  if (max_steps == 0 && schedule.warmup_steps + schedule.cosine_steps == 0) {
    return fail("max_steps", "schedule is empty");
  }
  if (eval_every <= 0) return fail("eval_every", "must be positive");
  if (patience <= 0) return fail("patience", "must be positive");
  if (max_val_samples <= 0) return fail("max_val_samples", "must be positive");
  if (shard_size <= 0) return fail("shard_size", "must be positive");
  return absl::OkStatus();
}

absl::StatusOr<TrainConfig> TrainConfigFromJson(const Json& j, const std::string& path) {
  TrainConfig c;
  ObjectReader r(j, path);
  r.Read("batch_size", &c.batch_size)
      .Read("peak_lr", &c.schedule.peak)
      .Read("floor_lr", &c.schedule.floor)
      .Read("warmup_steps", &c.schedule.warmup_steps)
      .Read("cosine_steps", &c.schedule.cosine_steps)
      .Read("max_steps", &c.max_steps)
      .Read("eval_every", &c.eval_every)
      .Read("patience", &c.patience)
      .Read("max_val_samples", &c.max_val_samples)
      .Read("shard_size", &c.shard_size)
      .Read("seed", &c.seed);
  if (const Json* net = r.Lookup("net")) {
    auto parsed = SetNetConfigFromJson(*net, r.KeyPath("net"));
    if (!parsed.ok()) return parsed.status();
    c.net = *parsed;
  }
  if (absl::Status s = r.Finish(); !s.ok()) return s;
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

Json TrainConfigToJson(const TrainConfig& c) {
  return Json{{"batch_size", c.batch_size},
              {"peak_lr", c.schedule.peak},
              {"floor_lr", c.schedule.floor},
              {"warmup_steps", c.schedule.warmup_steps},
              {"cosine_steps", c.schedule.cosine_steps},
              {"max_steps", c.max_steps},
              {"eval_every", c.eval_every},
              {"patience", c.patience},
              {"max_val_samples", c.max_val_samples},
              {"shard_size", c.shard_size},
              {"seed", c.seed},
              {"net", SetNetConfigToJson(c.net)}};
}

std::array<double, kWindowDays> MeanTarget(SampleView train) {
  std::array<double, kWindowDays> mean{};
  for (const Target& t : train.targets) {
    for (int k = 0; k < kWindowDays; ++k) mean[k] += t[k];
  }
  if (train.size() > 0) {
    for (double& m : mean) m /= static_cast<double>(train.size());
  }
  return mean;
}

double MeanPredictorMse(const std::array<double, kWindowDays>& mean, SampleView eval) {
  if (eval.size() == 0) return 0.0;
  double total = 0.0;
  for (const Target& t : eval.targets) {
    double s = 0.0;
    for (int k = 0; k < kWindowDays; ++k) s += (t[k] - mean[k]) * (t[k] - mean[k]);
    total += s / kWindowDays;
  }
  return total / static_cast<double>(eval.size());
}

double EvaluateMse(const Params<float>& params, SampleView samples, int shard_size) {
  if (samples.size() == 0) return 0.0;
  const std::vector<size_t> all = Iota(samples.size());
  const PointerView p = Pointers(samples, all);
  SetNetEngine<float> engine(shard_size);
  return engine.Loss(params, p.inputs, p.targets) / static_cast<double>(samples.size());
}

absl::StatusOr<TrainResult> Train(const TrainConfig& config, SampleView train, SampleView val,
                                  const Params<float>* init, std::ostream* log) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (train.size() == 0) return absl::InvalidArgumentError("training set is empty");
  if (val.size() == 0) return absl::InvalidArgumentError("validation set is empty");
  if (train.inputs.size() != train.targets.size() || val.inputs.size() != val.targets.size()) {
    return absl::InvalidArgumentError("inputs and targets differ in length");
  }

  Params<float> params =
      init != nullptr ? *init : InitParams(config.net, config.seed).Cast<float>();
  Adam adam(params.size(), config.adam);
  SetNetEngine<float> engine(config.shard_size);
  Params<float> grad(params.config());

  std::vector<size_t> val_idx = Iota(val.size());
  if (val_idx.size() > static_cast<size_t>(config.max_val_samples)) {
    Rng rng = MakeRng(config.seed, Stream::kTraining, {1});
    std::shuffle(val_idx.begin(), val_idx.end(), rng);
    val_idx.resize(config.max_val_samples);
    std::sort(val_idx.begin(), val_idx.end());
  }
  const PointerView val_ptrs = Pointers(val, val_idx);
  auto val_mse = [&](const Params<float>& p) {
    return engine.Loss(p, val_ptrs.inputs, val_ptrs.targets) / static_cast<double>(val_idx.size());
  };

  TrainResult result;
  {
    const auto mean = MeanTarget(train);
    double total = 0.0;
    for (size_t i : val_idx) {
      double s = 0.0;
      for (int k = 0; k < kWindowDays; ++k) {
        s += (val.targets[i][k] - mean[k]) * (val.targets[i][k] - mean[k]);
      }
      total += s / kWindowDays;
    }
    result.mean_predictor_mse = total / static_cast<double>(val_idx.size());
  }

  const int total_steps = config.max_steps > 0
                              ? config.max_steps
                              : config.schedule.warmup_steps + config.schedule.cosine_steps;
  std::vector<size_t> order = Iota(train.size());
  size_t cursor = order.size();
  uint64_t epoch = 0;
  std::vector<size_t> batch_idx;
  double running = 0.0;
  long running_n = 0;
  int since_best = 0;
  result.best_val_mse = INFINITY;
  if (log != nullptr) (*log) << "step,lr,train_mse,val_mse\n";

  for (int step = 1; step <= total_steps; ++step) {
    batch_idx.clear();
    while (batch_idx.size() < static_cast<size_t>(config.batch_size)) {
      if (cursor == order.size()) {
        Rng rng = MakeRng(config.seed, Stream::kTraining, {2, epoch++});
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch_idx.push_back(order[cursor++]);
      if (batch_idx.size() == train.size()) break;
    }
    const PointerView b = Pointers(train, batch_idx);
    const double loss = engine.LossAndGradient(params, b.inputs, b.targets, &grad);
    if (!std::isfinite(loss)) {
      return absl::InternalError(absl::StrCat("training diverged: non-finite loss at step ", step));
    }
    const double lr = config.schedule.At(step);
    adam.Step(grad.data(), lr, params.data());
    running += loss;
    running_n += static_cast<long>(batch_idx.size());
    result.steps_run = step;

    if (step % config.eval_every == 0 || step == total_steps) {
      const double v = val_mse(params);
      const double t = running / static_cast<double>(running_n);
      running = 0.0;
      running_n = 0;
      result.curve.push_back({step, lr, t, v});
      if (log != nullptr) (*log) << step << ',' << lr << ',' << t << ',' << v << '\n';
      if (!std::isfinite(v)) {
        return absl::InternalError(absl::StrCat("validation MSE is not finite at step ", step));
      }
      if (v < result.best_val_mse) {
        result.best_val_mse = v;
        result.best = params;
        result.best_step = step;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace pct
