#ifndef PCT_SETNET_MODEL_H_
#define PCT_SETNET_MODEL_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/predict/recommend.h"
#include "pct/setnet/features.h"
#include "pct/setnet/params.h"

namespace pct {

// Inputs of several samples laid out for the batched kernels. Day rows of
// sample b are rows 15b .. 15b+14 (row 15b+k is day offset k); encounter
// rows follow all day rows, grouped by sample.
template <typename T>
struct Batch {
  int size = 0;
  RowMatrix<T> status;     // 15B x kStatusFeatures
  RowMatrix<T> profile;    // B x kProfileFeatures
  std::vector<int> enc_begin;  // B + 1 offsets into the encounter rows
  std::vector<int> enc_sample;
  std::vector<int> enc_offset;
  std::vector<int> enc_level;
  RowMatrix<T> enc_count;  // E x count_dim
  RowMatrix<T> target;     // B x 15, empty when no targets were given

  int day_rows() const { return kWindowDays * size; }
  int enc_rows() const { return static_cast<int>(enc_level.size()); }
};

// `targets` is either empty or holds one 15-float row per input.
template <typename T>
void FillBatch(std::span<const SetInput* const> inputs, std::span<const float* const> targets,
               int count_dim, Batch<T>* batch);

// Intermediate values kept by Forward for Backward.
template <typename T>
struct Activations {
  RowMatrix<T> h1, h, g1, g, dd, din, ein;
  std::vector<RowMatrix<T>> x;       // num_blocks + 1 entries, N x width
  std::vector<RowMatrix<T>> a, u;    // per block, N x width
  std::vector<RowMatrix<T>> pooled;  // per block, B x width
  std::vector<std::vector<int>> argmax;
  RowMatrix<T> z1, z, yhat;          // yhat: 15B x 1
};

// Scratch buffers for Backward.
template <typename T>
struct GradScratch {
  RowMatrix<T> dz, dz1, dx, du, da, dpw, dpool, ddin, dein, dh, dh1, dg, dg1, ddd;
};

template <typename T>
void Forward(const Params<T>& params, const Batch<T>& batch, Activations<T>* acts);

// Sum over samples of the per-sample mean squared error.
template <typename T>
double BatchLoss(const Batch<T>& batch, const Activations<T>& acts);

// Adds the gradient of BatchLoss to `grad`.
template <typename T>
void Backward(const Params<T>& params, const Batch<T>& batch, const Activations<T>& acts,
              GradScratch<T>* scratch, Params<T>* grad);

// First set block whose output is non-finite, as an error naming it.
template <typename T>
absl::Status CheckFinite(const Activations<T>& acts);

// Mean over entries of (y - yhat)^2.
absl::StatusOr<double> MseLoss(std::span<const double> y, std::span<const double> yhat);

// Runs the kernels over fixed-size shards of a batch, in parallel with
// OpenMP. Shard boundaries do not depend on the thread count and shard
// gradients are summed in shard order, so results are reproducible for
// any number of threads.
template <typename T>
class SetNetEngine {
 public:
  explicit SetNetEngine(int shard_size = 32) : shard_size_(shard_size) {}

  // Returns the summed loss and overwrites `grad` with its gradient.
  double LossAndGradient(const Params<T>& params, std::span<const SetInput* const> inputs,
                         std::span<const float* const> targets, Params<T>* grad);
  double Loss(const Params<T>& params, std::span<const SetInput* const> inputs,
              std::span<const float* const> targets);
  void Predict(const Params<T>& params, std::span<const SetInput* const> inputs,
               std::span<History> out);

 private:
  // Scratch reused by one thread across shards.
  struct Workspace {
    Batch<T> batch;
    Activations<T> acts;
    GradScratch<T> scratch;
  };
  Workspace& ThreadWorkspace();
  void EnsureGrads(size_t count, const SetNetConfig& config);

  int shard_size_;
  std::vector<Workspace> workspaces_;
  // Per-shard results, reduced in shard order so sums do not depend on the
  // thread schedule.
  std::vector<Params<T>> shard_grads_;
  std::vector<double> shard_loss_;
};

}  // namespace pct

#endif  // PCT_SETNET_MODEL_H_
