#ifndef PCT_PIPELINE_RETRAIN_H_
#define PCT_PIPELINE_RETRAIN_H_

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/pipeline/dataset.h"
#include "pct/setnet/train.h"

namespace pct {

struct RetrainConfig {
  // Dataset shape for every iteration; the driver and seed are set per
  // iteration. driver.bins holds the frozen risk-bin table.
  GenerateConfig generate;
  TrainConfig train;
  int iterations = 3;
  // Peak learning rate when fine-tuning iterations after the first; the
  // floor is scaled by the same factor.
  double finetune_peak_lr = 5e-5;
  // Abort when the best validation MSE exceeds this multiple of the
  // mean-predictor MSE.
  double divergence_factor = 10.0;

  absl::Status Validate() const;
};

struct RetrainIteration {
  int iteration = 0;
  Params<float> checkpoint;
  TrainResult result;
  // Validation MSE of this checkpoint and of the previous checkpoint on
  // this iteration's validation split (unset for the first iteration).
  double val_mse = 0.0;
  std::optional<double> previous_val_mse;
  Json dataset_manifest;
};

// Per-iteration dataset seed and training seed derived from the master.
uint64_t IterationDataSeed(uint64_t master, int iteration);
uint64_t IterationTrainSeed(uint64_t master, int iteration);

// Iteration 1 trains from scratch on noisy-oracle-driven data; iteration
// j > 1 generates data with checkpoint j-1 driving the app and fine-tunes
// it with fresh optimizer moments. `on_iteration`, when set, sees each
// finished iteration before the next one starts.
absl::StatusOr<std::vector<RetrainIteration>> IterativeRetrain(
    const RetrainConfig& config, uint64_t master_seed, std::ostream* log = nullptr,
    const std::function<void(const RetrainIteration&, const GeneratedData&)>& on_iteration = {});

}  // namespace pct

#endif  // PCT_PIPELINE_RETRAIN_H_
