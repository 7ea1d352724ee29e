#include "pct/setnet/model.h"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "pct/common/check.h"

namespace pct {
namespace {

template <typename T>
T Softplus(T z) {
  return z > T(20) ? z : std::log1p(std::exp(z));
}

template <typename T>
T Sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

template <typename T>
void Relu(RowMatrix<T>& m) {
  m = m.cwiseMax(T(0));
}

// g *= (a > 0), elementwise.
template <typename T>
void MaskByPositive(const RowMatrix<T>& a, RowMatrix<T>& g) {
  g = (a.array() > T(0)).select(g.array(), T(0)).matrix();
}

}  // namespace

template <typename T>
void FillBatch(std::span<const SetInput* const> inputs, std::span<const float* const> targets,
               int count_dim, Batch<T>* batch) {
  PCT_CHECK(targets.empty() || targets.size() == inputs.size(), "one target per input");
  const int b_count = static_cast<int>(inputs.size());
  Batch<T>& b = *batch;
  b.size = b_count;
  b.status.resize(kWindowDays * b_count, kStatusFeatures);
  b.profile.resize(b_count, kProfileFeatures);
  b.enc_begin.assign(1, 0);
  b.enc_sample.clear();
  b.enc_offset.clear();
  b.enc_level.clear();
  int total = 0;
  for (const SetInput* in : inputs) total += static_cast<int>(in->clusters.size());
  b.enc_count.resize(total, count_dim);
  std::vector<double> count_row(count_dim);
  int e = 0;
  for (int s = 0; s < b_count; ++s) {
    const SetInput& in = *inputs[s];
    for (int k = 0; k < kWindowDays; ++k) {
      EncodeStatus(in.statuses[k], b.status.row(kWindowDays * s + k).data());
    }
    EncodeProfile(in, b.profile.row(s).data());
    for (const Cluster& c : in.clusters) {
      PCT_CHECK(c.day_offset >= 0 && c.day_offset < kWindowDays, "cluster outside the window");
      PCT_CHECK(c.risk_level >= 0 && c.risk_level < 16, "cluster level out of range");
      b.enc_sample.push_back(s);
      b.enc_offset.push_back(c.day_offset);
      b.enc_level.push_back(c.risk_level);
      EncodeCountInto(c.count, count_dim, count_row.data());
      for (int j = 0; j < count_dim; ++j) b.enc_count(e, j) = static_cast<T>(count_row[j]);
      ++e;
    }
    b.enc_begin.push_back(e);
  }
  if (targets.empty()) {
    b.target.resize(0, 0);
  } else {
    b.target.resize(b_count, kWindowDays);
    for (int s = 0; s < b_count; ++s) {
      for (int k = 0; k < kWindowDays; ++k) b.target(s, k) = static_cast<T>(targets[s][k]);
    }
  }
}

template <typename T>
void Forward(const Params<T>& p, const Batch<T>& batch, Activations<T>* acts) {
  const SetNetConfig& c = p.config();
  Activations<T>& A = *acts;
  const int B = batch.size;
  const int R = batch.day_rows();
  const int E = batch.enc_rows();
  const int N = R + E;

  A.h1.noalias() = batch.status * p.M(kStatusW1);
  A.h1.rowwise() += p.V(kStatusB1);
  Relu(A.h1);
  A.h.noalias() = A.h1 * p.M(kStatusW2);
  A.h.rowwise() += p.V(kStatusB2);

  A.g1.noalias() = batch.profile * p.M(kProfileW1);
  A.g1.rowwise() += p.V(kProfileB1);
  Relu(A.g1);
  A.g.noalias() = A.g1 * p.M(kProfileW2);
  A.g.rowwise() += p.V(kProfileB2);

  A.dd.resize(R, c.day_out);
  for (int r = 0; r < R; ++r) {
    const T offset = -static_cast<T>(r % kWindowDays) / static_cast<T>(kMaxLookbackDays);
    A.dd.row(r) = offset * p.V(kDayW) + p.V(kDayB);
  }

  A.din.resize(R, c.day_element_width());
  A.din.leftCols(c.status_out) = A.h;
  for (int r = 0; r < R; ++r) {
    A.din.row(r).segment(c.status_out, c.profile_out) = A.g.row(r / kWindowDays);
  }
  A.din.rightCols(c.day_out) = A.dd;

  A.ein.resize(E, c.encounter_element_width());
  const auto risk = p.M(kRiskEmbedding);
  for (int e = 0; e < E; ++e) {
    const int r = kWindowDays * batch.enc_sample[e] + batch.enc_offset[e];
    auto row = A.ein.row(e);
    row.segment(0, c.risk_dim) = risk.row(batch.enc_level[e]);
    row.segment(c.risk_dim, c.count_dim) = batch.enc_count.row(e);
    row.segment(c.risk_dim + c.count_dim, c.status_out) = A.h.row(r);
    row.segment(c.risk_dim + c.count_dim + c.status_out, c.day_out) = A.dd.row(r);
  }

  A.x.resize(c.num_blocks + 1);
  A.a.resize(c.num_blocks);
  A.u.resize(c.num_blocks);
  A.pooled.resize(c.num_blocks);
  A.argmax.resize(c.num_blocks);
  A.x[0].resize(N, c.width);
  A.x[0].topRows(R).noalias() = A.din * p.M(kDayProjW);
  A.x[0].topRows(R).rowwise() += p.V(kDayProjB);
  if (E > 0) {
    A.x[0].bottomRows(E).noalias() = A.ein * p.M(kEncProjW);
    A.x[0].bottomRows(E).rowwise() += p.V(kEncProjB);
  }

  RowMatrix<T> pw;
  for (int blk = 0; blk < c.num_blocks; ++blk) {
    RowMatrix<T>& a = A.a[blk];
    a.noalias() = A.x[blk] * p.M(BlockTensorId(blk, kBlockW1));
    a.rowwise() += p.V(BlockTensorId(blk, kBlockB1));
    Relu(a);

    RowMatrix<T>& pooled = A.pooled[blk];
    std::vector<int>& arg = A.argmax[blk];
    pooled.resize(B, c.width);
    arg.assign(static_cast<size_t>(B) * c.width, 0);
    for (int s = 0; s < B; ++s) {
      T* best = pooled.row(s).data();
      int* idx = arg.data() + static_cast<size_t>(s) * c.width;
      const int first = kWindowDays * s;
      std::copy(a.row(first).data(), a.row(first).data() + c.width, best);
      std::fill(idx, idx + c.width, first);
      auto scan = [&](int r) {
        const T* v = a.row(r).data();
        for (int j = 0; j < c.width; ++j) {
          if (v[j] > best[j]) {
            best[j] = v[j];
            idx[j] = r;
          }
        }
      };
      for (int r = first + 1; r < first + kWindowDays; ++r) scan(r);
      for (int e = batch.enc_begin[s]; e < batch.enc_begin[s + 1]; ++e) scan(R + e);
    }

    pw.noalias() = pooled * p.M(BlockTensorId(blk, kBlockW2p));
    pw.rowwise() += p.V(BlockTensorId(blk, kBlockB2));
    RowMatrix<T>& u = A.u[blk];
    u.noalias() = a * p.M(BlockTensorId(blk, kBlockW2a));
    for (int r = 0; r < R; ++r) u.row(r) += pw.row(r / kWindowDays);
    for (int e = 0; e < E; ++e) u.row(R + e) += pw.row(batch.enc_sample[e]);
    Relu(u);
    A.x[blk + 1] = A.x[blk] + u;
  }

  A.z1.noalias() = A.x[c.num_blocks].topRows(R) * p.M(kHeadW1);
  A.z1.rowwise() += p.V(kHeadB1);
  Relu(A.z1);
  A.z.noalias() = A.z1 * p.M(kHeadW2);
  A.z.array() += p.V(kHeadB2)(0);
  A.yhat = A.z.unaryExpr([](T v) { return Softplus(v); });
}

template <typename T>
double BatchLoss(const Batch<T>& batch, const Activations<T>& acts) {
  PCT_CHECK(batch.target.rows() == batch.size, "batch has no targets");
  double total = 0.0;
  for (int s = 0; s < batch.size; ++s) {
    double sum = 0.0;
    for (int k = 0; k < kWindowDays; ++k) {
      const double d = static_cast<double>(acts.yhat(kWindowDays * s + k, 0)) -
                       static_cast<double>(batch.target(s, k));
      sum += d * d;
    }
    total += sum / kWindowDays;
  }
  return total;
}

template <typename T>
void Backward(const Params<T>& p, const Batch<T>& batch, const Activations<T>& A,
              GradScratch<T>* scratch, Params<T>* grad) {
  const SetNetConfig& c = p.config();
  GradScratch<T>& S = *scratch;
  Params<T>& G = *grad;
  const int B = batch.size;
  const int R = batch.day_rows();
  const int E = batch.enc_rows();
  const int N = R + E;

  S.dz.resize(R, 1);
  for (int s = 0; s < B; ++s) {
    for (int k = 0; k < kWindowDays; ++k) {
      const int r = kWindowDays * s + k;
      const T dy = T(2) * (A.yhat(r, 0) - batch.target(s, k)) / T(kWindowDays);
      S.dz(r, 0) = dy * Sigmoid(A.z(r, 0));
    }
  }
  G.M(kHeadW2).noalias() += A.z1.transpose() * S.dz;
  G.V(kHeadB2)(0) += S.dz.sum();
  S.dz1.noalias() = S.dz * p.M(kHeadW2).transpose();
  MaskByPositive(A.z1, S.dz1);
  G.M(kHeadW1).noalias() += A.x[c.num_blocks].topRows(R).transpose() * S.dz1;
  G.V(kHeadB1) += S.dz1.colwise().sum();

  S.dx.setZero(N, c.width);
  S.dx.topRows(R).noalias() = S.dz1 * p.M(kHeadW1).transpose();

  for (int blk = c.num_blocks - 1; blk >= 0; --blk) {
    const RowMatrix<T>& a = A.a[blk];
    S.du = (A.u[blk].array() > T(0)).select(S.dx.array(), T(0)).matrix();
    G.M(BlockTensorId(blk, kBlockW2a)).noalias() += a.transpose() * S.du;
    G.V(BlockTensorId(blk, kBlockB2)) += S.du.colwise().sum();

    S.dpw.setZero(B, c.width);
    for (int r = 0; r < R; ++r) S.dpw.row(r / kWindowDays) += S.du.row(r);
    for (int e = 0; e < E; ++e) S.dpw.row(batch.enc_sample[e]) += S.du.row(R + e);
    G.M(BlockTensorId(blk, kBlockW2p)).noalias() += A.pooled[blk].transpose() * S.dpw;
    S.dpool.noalias() = S.dpw * p.M(BlockTensorId(blk, kBlockW2p)).transpose();

    S.da.noalias() = S.du * p.M(BlockTensorId(blk, kBlockW2a)).transpose();
    const std::vector<int>& arg = A.argmax[blk];
    for (int s = 0; s < B; ++s) {
      const int* idx = arg.data() + static_cast<size_t>(s) * c.width;
      for (int j = 0; j < c.width; ++j) S.da(idx[j], j) += S.dpool(s, j);
    }
    MaskByPositive(a, S.da);
    G.M(BlockTensorId(blk, kBlockW1)).noalias() += A.x[blk].transpose() * S.da;
    G.V(BlockTensorId(blk, kBlockB1)) += S.da.colwise().sum();
    S.dx.noalias() += S.da * p.M(BlockTensorId(blk, kBlockW1)).transpose();
  }

  G.M(kDayProjW).noalias() += A.din.transpose() * S.dx.topRows(R);
  G.V(kDayProjB) += S.dx.topRows(R).colwise().sum();
  S.ddin.noalias() = S.dx.topRows(R) * p.M(kDayProjW).transpose();
  S.dh = S.ddin.leftCols(c.status_out);
  S.ddd = S.ddin.rightCols(c.day_out);
  S.dg.setZero(B, c.profile_out);
  for (int r = 0; r < R; ++r) {
    S.dg.row(r / kWindowDays) += S.ddin.row(r).segment(c.status_out, c.profile_out);
  }

  if (E > 0) {
    G.M(kEncProjW).noalias() += A.ein.transpose() * S.dx.bottomRows(E);
    G.V(kEncProjB) += S.dx.bottomRows(E).colwise().sum();
    S.dein.noalias() = S.dx.bottomRows(E) * p.M(kEncProjW).transpose();
    auto risk_grad = G.M(kRiskEmbedding);
    for (int e = 0; e < E; ++e) {
      const int r = kWindowDays * batch.enc_sample[e] + batch.enc_offset[e];
      const auto row = S.dein.row(e);
      risk_grad.row(batch.enc_level[e]) += row.segment(0, c.risk_dim);
      S.dh.row(r) += row.segment(c.risk_dim + c.count_dim, c.status_out);
      S.ddd.row(r) += row.segment(c.risk_dim + c.count_dim + c.status_out, c.day_out);
    }
  }

  auto day_w = G.V(kDayW);
  for (int r = 0; r < R; ++r) {
    const T offset = -static_cast<T>(r % kWindowDays) / static_cast<T>(kMaxLookbackDays);
    day_w += offset * S.ddd.row(r);
  }
  G.V(kDayB) += S.ddd.colwise().sum();

  G.M(kProfileW2).noalias() += A.g1.transpose() * S.dg;
  G.V(kProfileB2) += S.dg.colwise().sum();
  S.dg1.noalias() = S.dg * p.M(kProfileW2).transpose();
  MaskByPositive(A.g1, S.dg1);
  G.M(kProfileW1).noalias() += batch.profile.transpose() * S.dg1;
  G.V(kProfileB1) += S.dg1.colwise().sum();

  G.M(kStatusW2).noalias() += A.h1.transpose() * S.dh;
  G.V(kStatusB2) += S.dh.colwise().sum();
  S.dh1.noalias() = S.dh * p.M(kStatusW2).transpose();
  MaskByPositive(A.h1, S.dh1);
  G.M(kStatusW1).noalias() += batch.status.transpose() * S.dh1;
  G.V(kStatusB1) += S.dh1.colwise().sum();
}

template <typename T>
absl::Status CheckFinite(const Activations<T>& acts) {
  for (size_t b = 1; b < acts.x.size(); ++b) {
    if (!acts.x[b].allFinite()) {
      return absl::InternalError(absl::StrCat("non-finite activation in set block ", b - 1));
    }
  }
  if (!acts.yhat.allFinite()) return absl::InternalError("non-finite activation in output head");
  return absl::OkStatus();
}

absl::StatusOr<double> MseLoss(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("loss length mismatch: ", y.size(), " vs ", yhat.size()));
  }
  if (y.empty()) return absl::InvalidArgumentError("loss of empty histories");
  double sum = 0.0;
  for (size_t k = 0; k < y.size(); ++k) sum += (y[k] - yhat[k]) * (y[k] - yhat[k]);
  return sum / static_cast<double>(y.size());
}

template <typename T>
typename SetNetEngine<T>::Workspace& SetNetEngine<T>::ThreadWorkspace() {
  return workspaces_[omp_get_thread_num()];
}

template <typename T>
void SetNetEngine<T>::EnsureGrads(size_t count, const SetNetConfig& config) {
  if (shard_grads_.size() < count) shard_grads_.resize(count);
  for (size_t i = 0; i < count; ++i) {
    if (shard_grads_[i].size() == 0 || !(shard_grads_[i].config() == config)) {
      shard_grads_[i] = Params<T>(config);
    }
  }
}

template <typename T>
double SetNetEngine<T>::LossAndGradient(const Params<T>& params,
                                        std::span<const SetInput* const> inputs,
                                        std::span<const float* const> targets,
                                        Params<T>* grad) {
  PCT_CHECK(inputs.size() == targets.size(), "one target per input");
  const size_t n = inputs.size();
  const size_t num_shards = (n + shard_size_ - 1) / shard_size_;
  EnsureGrads(num_shards, params.config());
  shard_loss_.assign(num_shards, 0.0);
  workspaces_.resize(omp_get_max_threads());
  const int count_dim = params.config().count_dim;
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t i = 0; i < num_shards; ++i) {
    Workspace& ws = ThreadWorkspace();
    const size_t lo = i * shard_size_;
    const size_t len = std::min<size_t>(shard_size_, n - lo);
    FillBatch<T>(inputs.subspan(lo, len), targets.subspan(lo, len), count_dim, &ws.batch);
    Forward(params, ws.batch, &ws.acts);
#ifndef NDEBUG
    absl::Status finite = CheckFinite(ws.acts);
    PCT_CHECK(finite.ok(), std::string(finite.message()).c_str());
#endif
    shard_loss_[i] = BatchLoss(ws.batch, ws.acts);
    shard_grads_[i].SetZero();
    Backward(params, ws.batch, ws.acts, &ws.scratch, &shard_grads_[i]);
  }
  if (grad->size() != params.size()) *grad = Params<T>(params.config());
  grad->SetZero();
  double loss = 0.0;
  auto& g = grad->data();
  for (size_t i = 0; i < num_shards; ++i) {
    loss += shard_loss_[i];
    const auto& sg = shard_grads_[i].data();
    for (size_t j = 0; j < g.size(); ++j) g[j] += sg[j];
  }
  return loss;
}

template <typename T>
double SetNetEngine<T>::Loss(const Params<T>& params, std::span<const SetInput* const> inputs,
                             std::span<const float* const> targets) {
  PCT_CHECK(inputs.size() == targets.size(), "one target per input");
  const size_t n = inputs.size();
  const size_t num_shards = (n + shard_size_ - 1) / shard_size_;
  shard_loss_.assign(num_shards, 0.0);
  workspaces_.resize(omp_get_max_threads());
  const int count_dim = params.config().count_dim;
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t i = 0; i < num_shards; ++i) {
    Workspace& ws = ThreadWorkspace();
    const size_t lo = i * shard_size_;
    const size_t len = std::min<size_t>(shard_size_, n - lo);
    FillBatch<T>(inputs.subspan(lo, len), targets.subspan(lo, len), count_dim, &ws.batch);
    Forward(params, ws.batch, &ws.acts);
    shard_loss_[i] = BatchLoss(ws.batch, ws.acts);
  }
  double loss = 0.0;
  for (size_t i = 0; i < num_shards; ++i) loss += shard_loss_[i];
  return loss;
}

template <typename T>
void SetNetEngine<T>::Predict(const Params<T>& params, std::span<const SetInput* const> inputs,
                              std::span<History> out) {
  PCT_CHECK(inputs.size() == out.size(), "one output per input");
  const size_t n = inputs.size();
  const size_t num_shards = (n + shard_size_ - 1) / shard_size_;
  workspaces_.resize(omp_get_max_threads());
  const int count_dim = params.config().count_dim;
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t i = 0; i < num_shards; ++i) {
    Workspace& ws = ThreadWorkspace();
    const size_t lo = i * shard_size_;
    const size_t len = std::min<size_t>(shard_size_, n - lo);
    FillBatch<T>(inputs.subspan(lo, len), {}, count_dim, &ws.batch);
    Forward(params, ws.batch, &ws.acts);
    for (size_t s = 0; s < len; ++s) {
      for (int k = 0; k < kWindowDays; ++k) {
        out[lo + s][k] = static_cast<double>(ws.acts.yhat(kWindowDays * s + k, 0));
      }
    }
  }
}

template void FillBatch<float>(std::span<const SetInput* const>, std::span<const float* const>,
                               int, Batch<float>*);
template void FillBatch<double>(std::span<const SetInput* const>, std::span<const float* const>,
                                int, Batch<double>*);
template void Forward<float>(const Params<float>&, const Batch<float>&, Activations<float>*);
template void Forward<double>(const Params<double>&, const Batch<double>&, Activations<double>*);
template double BatchLoss<float>(const Batch<float>&, const Activations<float>&);
template double BatchLoss<double>(const Batch<double>&, const Activations<double>&);
template void Backward<float>(const Params<float>&, const Batch<float>&,
                              const Activations<float>&, GradScratch<float>*, Params<float>*);
template void Backward<double>(const Params<double>&, const Batch<double>&,
                               const Activations<double>&, GradScratch<double>*,
                               Params<double>*);
template absl::Status CheckFinite<float>(const Activations<float>&);
template absl::Status CheckFinite<double>(const Activations<double>&);
template class SetNetEngine<float>;
template class SetNetEngine<double>;

}  // namespace pct
