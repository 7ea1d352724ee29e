#include "pct/pipeline/retrain.h"

#include "absl/strings/str_cat.h"
#include "pct/common/rng.h"

namespace pct {

absl::Status RetrainConfig::Validate() const {
  if (iterations < 1) return absl::InvalidArgumentError("iterations must be >= 1");
  if (!(finetune_peak_lr > 0)) return absl::InvalidArgumentError("finetune_peak_lr must be > 0");
  if (!(divergence_factor > 0)) return absl::InvalidArgumentError("divergence_factor must be > 0");
  return train.Validate();
}

uint64_t IterationDataSeed(uint64_t master, int iteration) {
  return DeriveSeed(master, Stream::kPipeline, {static_cast<uint64_t>(iteration), 0});
}

uint64_t IterationTrainSeed(uint64_t master, int iteration) {
  return DeriveSeed(master, Stream::kPipeline, {static_cast<uint64_t>(iteration), 1});
}

absl::StatusOr<std::vector<RetrainIteration>> IterativeRetrain(
    const RetrainConfig& config, uint64_t master_seed, std::ostream* log,
    const std::function<void(const RetrainIteration&, const GeneratedData&)>& on_iteration) {
  if (auto s = config.Validate(); !s.ok()) return s;
  std::vector<RetrainIteration> out;
  for (int it = 1; it <= config.iterations; ++it) {
    GenerateConfig gen = config.generate;
    gen.seed = IterationDataSeed(master_seed, it);
    const Params<float>* previous = out.empty() ? nullptr : &out.back().checkpoint;
    gen.driver.method = previous == nullptr ? Method::kNoisyOracle : Method::kSetNet;
    gen.driver.model = previous;
    if (log) *log << "# iteration " << it << ": generating with " << MethodName(gen.driver.method) << '\n';
    absl::StatusOr<GeneratedData> data = GenerateDataset(gen);
    if (!data.ok()) return data.status();

    TrainConfig tc = config.train;
    tc.seed = IterationTrainSeed(master_seed, it);
    if (previous != nullptr) {
      const double scale = config.finetune_peak_lr / tc.schedule.peak;
      tc.schedule.peak *= scale;
      tc.schedule.floor *= scale;
    }
    absl::StatusOr<TrainResult> trained = Train(tc, data->train.view(), data->val.view(), previous, log);
    if (!trained.ok()) {
      return absl::Status(trained.status().code(),
                          absl::StrCat("iteration ", it, ": ", trained.status().message()));
    }
    if (trained->best_val_mse > config.divergence_factor * trained->mean_predictor_mse) {
      return absl::AbortedError(absl::StrCat(
          "iteration ", it, " diverged: best val MSE ", trained->best_val_mse,
          " exceeds ", config.divergence_factor, "x the mean-predictor MSE ",
          trained->mean_predictor_mse, " (best step ", trained->best_step, ", steps run ",
          trained->steps_run, ")"));
    }
    RetrainIteration r;
    r.iteration = it;
    r.checkpoint = trained->best;
    r.val_mse = trained->best_val_mse;
    if (previous != nullptr) {
      r.previous_val_mse = EvaluateMse(*previous, data->val.view(), tc.shard_size);
    }
    r.result = std::move(*trained);
    r.dataset_manifest = data->manifest;
    if (log) {
      *log << "# iteration " << it << ": val_mse " << r.val_mse;
      if (r.previous_val_mse) *log << " previous_checkpoint_val_mse " << *r.previous_val_mse;
      *log << '\n';
    }
    if (on_iteration) on_iteration(r, *data);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pct
