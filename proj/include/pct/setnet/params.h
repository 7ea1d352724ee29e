#ifndef PCT_SETNET_PARAMS_H_
#define PCT_SETNET_PARAMS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "pct/common/json_util.h"

namespace pct {

// Layer widths. Inputs are fixed by the feature encoders.
struct SetNetConfig {
  int status_hidden = 32;
  int status_out = 32;
  int profile_hidden = 16;
  int profile_out = 16;
  int day_out = 8;
  int risk_dim = 16;
  int count_dim = 16;
  int width = 128;
  int head_hidden = 64;
  int num_blocks = 5;

  int day_element_width() const { return status_out + profile_out + day_out; }
  int encounter_element_width() const { return risk_dim + count_dim + status_out + day_out; }
  absl::Status Validate() const;
  bool operator==(const SetNetConfig&) const = default;
};

absl::StatusOr<SetNetConfig> SetNetConfigFromJson(const Json& j, const std::string& path);
Json SetNetConfigToJson(const SetNetConfig& c);

// Tensor ids. Matrices are stored row-major with shape (fan_in, fan_out) so
// that a layer is x * W + b on row vectors.
enum TensorId : int {
  kStatusW1 = 0,
  kStatusB1,
  kStatusW2,
  kStatusB2,
  kProfileW1,
  kProfileB1,
  kProfileW2,
  kProfileB2,
  kDayW,
  kDayB,
  kRiskEmbedding,
  kDayProjW,
  kDayProjB,
  kEncProjW,
  kEncProjB,
  kHeadW1,
  kHeadB1,
  kHeadW2,
  kHeadB2,
  kNumFixedTensors,
};

// Per set block: pre-pool layer, post-concat layer split into the element
// half (W2a) and the pooled half (W2p).
enum BlockTensor : int { kBlockW1 = 0, kBlockB1, kBlockW2a, kBlockW2p, kBlockB2, kTensorsPerBlock };

inline int BlockTensorId(int block, int t) { return kNumFixedTensors + block * kTensorsPerBlock + t; }

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  size_t offset = 0;
  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

std::vector<TensorSpec> MakeLayout(const SetNetConfig& config);

// Parameter storage is over-aligned so that every allocation presents the
// same alignment to the vectorized kernels. Eigen picks its peeling and
// summation order from pointer alignment, so unaligned buffers would make
// results depend on where malloc happened to place them.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// All trainable parameters in one flat buffer; gradients and optimizer
// moments use the same type.
template <typename T>
class Params {
 public:
  Params() = default;
  explicit Params(const SetNetConfig& config);

  const SetNetConfig& config() const { return config_; }
  const std::vector<TensorSpec>& layout() const { return layout_; }
  AlignedVector<T>& data() { return data_; }
  const AlignedVector<T>& data() const { return data_; }
  size_t size() const { return data_.size(); }
  int num_tensors() const { return static_cast<int>(layout_.size()); }

  Eigen::Map<RowMatrix<T>> M(int id) {
    const TensorSpec& s = layout_[id];
    return Eigen::Map<RowMatrix<T>>(data_.data() + s.offset, s.rows, s.cols);
  }
  Eigen::Map<const RowMatrix<T>> M(int id) const {
    const TensorSpec& s = layout_[id];
    return Eigen::Map<const RowMatrix<T>>(data_.data() + s.offset, s.rows, s.cols);
  }
  // Bias vectors as 1 x n rows.
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> V(int id) {
    const TensorSpec& s = layout_[id];
    return Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(data_.data() + s.offset, s.size());
  }
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> V(int id) const {
    const TensorSpec& s = layout_[id];
    return Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(data_.data() + s.offset,
                                                                s.size());
  }

  void SetZero() { std::fill(data_.begin(), data_.end(), T(0)); }
  bool AllFinite() const;

  template <typename U>
  Params<U> Cast() const {
    Params<U> out(config_);
    for (size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  SetNetConfig config_;
  std::vector<TensorSpec> layout_;
  AlignedVector<T> data_;
};

// Uniform fan-in initialization; residual branches are scaled down so the
// stack starts close to the identity and the head bias starts at a small
// positive prediction.
Params<double> InitParams(const SetNetConfig& config, uint64_t seed);

// JSON container: {"format", "version", "config", "tensors": [{"name",
// "shape", "data"}]}. Values are written as shortest round-trip decimals.
Json ParamsToJson(const Params<float>& params);
absl::StatusOr<Params<float>> ParamsFromJson(const Json& j);
absl::Status SaveParams(const Params<float>& params, const std::string& path);
absl::StatusOr<Params<float>> LoadParams(const std::string& path);

}  // namespace pct

#endif  // PCT_SETNET_PARAMS_H_
