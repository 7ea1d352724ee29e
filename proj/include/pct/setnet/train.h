#ifndef PCT_SETNET_TRAIN_H_
#define PCT_SETNET_TRAIN_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/common/json_util.h"
#include "pct/setnet/features.h"
#include "pct/setnet/optim.h"
#include "pct/setnet/params.h"

namespace pct {

using Target = std::array<float, kWindowDays>;

// Parallel views of a labelled sample set.
struct SampleView {
  std::span<const SetInput> inputs;
  std::span<const Target> targets;
  size_t size() const { return inputs.size(); }
};

struct TrainConfig {
  SetNetConfig net;
  int batch_size = 128;
  LrSchedule schedule;
  // Training stops at schedule end or after `patience` evaluations without
  // a new best validation MSE.
  int max_steps = 0;  // 0: warmup + cosine steps
  int eval_every = 500;
  int patience = 5;
  // Validation is measured on at most this many samples, a fixed subset
  // chosen once per run.
  int max_val_samples = 20000;
  int shard_size = 32;
  uint64_t seed = 0;
  AdamConfig adam;

  absl::Status Validate() const;
};

absl::StatusOr<TrainConfig> TrainConfigFromJson(const Json& j, const std::string& path);
Json TrainConfigToJson(const TrainConfig& c);

struct CurvePoint {
  int step = 0;
  double lr = 0.0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  Params<float> best;
  int best_step = 0;
  double best_val_mse = 0.0;
  // MSE on the validation subset of the per-offset training mean.
  double mean_predictor_mse = 0.0;
  int steps_run = 0;
  bool early_stopped = false;
  std::vector<CurvePoint> curve;
};

// Trains from `init` when given, otherwise from fresh parameters seeded by
// config.seed. Optimizer moments always start at zero. When `log` is
// non-null, writes "step,lr,train_mse,val_mse" rows at each evaluation.
absl::StatusOr<TrainResult> Train(const TrainConfig& config, SampleView train, SampleView val,
                                  const Params<float>* init = nullptr,
                                  std::ostream* log = nullptr);

// Mean per-sample MSE of `params` on a sample set.
double EvaluateMse(const Params<float>& params, SampleView samples, int shard_size = 32);

// Per-offset mean target of `train`, and its MSE on `eval`.
std::array<double, kWindowDays> MeanTarget(SampleView train);
double MeanPredictorMse(const std::array<double, kWindowDays>& mean, SampleView eval);

}  // namespace pct

#endif  // PCT_SETNET_TRAIN_H_
