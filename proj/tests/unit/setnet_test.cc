#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "pct/setnet/features.h"
#include "pct/setnet/model.h"
#include "pct/setnet/optim.h"
#include "pct/setnet/params.h"
#include "pct/setnet/reference.h"
#include "pct/setnet/train.h"
#include "support/gradient_check.h"
#include "support/random_inputs.h"

namespace pct {
namespace {

using testing::Jitter;
using testing::RandomSetInput;
using testing::RandomTarget;
using testing::SmallNetConfig;

Params<double> RandomParams(const SetNetConfig& config, std::mt19937_64& rng) {
  Params<double> p = InitParams(config, rng());
  Jitter(p, rng, 0.05);
  return p;
}

double MaxAbsDiff(const History& a, const History& b) {
  double m = 0.0;
  for (int k = 0; k < kWindowDays; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

TEST(EncodeCount, Examples) {
  const std::vector<double> zero = *EncodeCount(0, 16);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(zero[i], i % 2 == 0 ? 0.0 : 1.0);
  const std::vector<double> one = *EncodeCount(1, 16);
  EXPECT_NEAR(one[0], 0.841471, 1e-6);
  EXPECT_NEAR(one[1], std::cos(1.0), 1e-12);
  EXPECT_NEAR(one[4], std::sin(1e-8), 1e-12);
  EXPECT_NEAR(one[4], 1e-8, 1e-12);
  EXPECT_FALSE(EncodeCount(3, 7).ok());
}

TEST(MseLoss, Examples) {
  std::vector<double> y(kWindowDays, 0.0), zero(kWindowDays, 0.0);
  y[0] = 1.0;
  EXPECT_EQ(*MseLoss(y, y), 0.0);
  EXPECT_NEAR(*MseLoss(y, zero), 1.0 / 15, 1e-12);
  EXPECT_FALSE(MseLoss(y, std::vector<double>(14, 0.0)).ok());
}

TEST(InputSet, ElementCountsAndMask) {
  std::mt19937_64 rng(1);
  const Params<double> p = RandomParams(SetNetConfig{}, rng);
  SetInput in = RandomSetInput(rng, 0);
  in.clusters.clear();
  ElementSet set = BuildInputSet(in, p);
  EXPECT_EQ(set.elements.size(), 15u);
  for (int k : set.day_index) EXPECT_GE(k, 0);
  in.clusters = {{1, 3, 2}, {4, 7, 1}};
  set = BuildInputSet(in, p);
  ASSERT_EQ(set.elements.size(), 17u);
  EXPECT_EQ(std::count(set.day_index.begin(), set.day_index.end(), -1), 2);
  for (const auto& e : set.elements) EXPECT_EQ(e.size(), 128u);
}

TEST(InputSet, ClusterOrderDoesNotChangeTheMultiset) {
  std::mt19937_64 rng(2);
  const Params<double> p = RandomParams(SetNetConfig{}, rng);
  SetInput in = RandomSetInput(rng, 12);
  SetInput shuffled = in;
  std::shuffle(shuffled.clusters.begin(), shuffled.clusters.end(), rng);
  auto a = BuildInputSet(in, p).elements;
  auto b = BuildInputSet(shuffled, p).elements;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Forward, PermutationInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Params<double> p = RandomParams(SetNetConfig{}, rng);
    const SetInput in = RandomSetInput(rng, 12);
    const ElementSet set = BuildInputSet(in, p);
    std::vector<size_t> order(set.elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    ElementSet perm;
    for (size_t i : order) {
      perm.elements.push_back(set.elements[i]);
      perm.day_index.push_back(set.day_index[i]);
    }
    EXPECT_LT(MaxAbsDiff(ReferenceForwardSet(set, p), ReferenceForwardSet(perm, p)), 1e-6);
  }
}

TEST(Forward, DuplicatedEncounterElementIsAbsorbed) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Params<double> p = RandomParams(SetNetConfig{}, rng);
    SetInput in = RandomSetInput(rng, 8);
    in.clusters.push_back({2, 9, 1});
    ElementSet set = BuildInputSet(in, p);
    const History before = ReferenceForwardSet(set, p);
    const auto it = std::find(set.day_index.begin(), set.day_index.end(), -1);
    ASSERT_NE(it, set.day_index.end());
    set.elements.push_back(set.elements[it - set.day_index.begin()]);
    set.day_index.push_back(-1);
    EXPECT_LT(MaxAbsDiff(before, ReferenceForwardSet(set, p)), 1e-6);
  }
}

TEST(Forward, OutputsAreNonNegative) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Params<double> p = RandomParams(SetNetConfig{}, rng);
    Jitter(p, rng, 0.5);
    for (double v : ReferenceForward(RandomSetInput(rng), p)) EXPECT_GE(v, 0.0);
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const SetNetConfig config = SmallNetConfig(rng);
    const Params<double> p = RandomParams(config, rng);
    std::vector<SetInput> inputs;
    std::vector<History> targets;
    for (int i = 0; i < 2; ++i) {
      inputs.push_back(RandomSetInput(rng, 4));
      const Target t = RandomTarget(rng);
      History h;
      std::copy(t.begin(), t.end(), h.begin());
      targets.push_back(h);
    }
    const testing::GradientCheckReport r = testing::CheckGradient(inputs, targets, p, 1e-4, 1e-4);
    EXPECT_EQ(r.failures, 0u) << "worst relative error " << r.worst_relative_error;
    EXPECT_GT(r.checked, 9 * (r.checked + r.skipped_kinks) / 10);
  }
}

TEST(Backward, ZeroAtPerfectPrediction) {
  std::mt19937_64 rng(7);
  const Params<double> p = RandomParams(SetNetConfig{}, rng);
  const SetInput in = RandomSetInput(rng);
  const History y = ReferenceForward(in, p);
  Params<double> grad(p.config());
  grad.SetZero();
  EXPECT_NEAR(ReferenceLossAndGradient(in, y, p, &grad), 0.0, 1e-20);
  for (double g : grad.data()) EXPECT_EQ(g, 0.0);
}

struct EngineFixture {
  std::vector<SetInput> inputs;
  std::vector<Target> targets;
  std::vector<const SetInput*> in_ptrs;
  std::vector<const float*> t_ptrs;

  EngineFixture(std::mt19937_64& rng, int n) {
    for (int i = 0; i < n; ++i) {
      inputs.push_back(RandomSetInput(rng, 12));
      targets.push_back(RandomTarget(rng));
    }
    for (int i = 0; i < n; ++i) {
      in_ptrs.push_back(&inputs[i]);
      t_ptrs.push_back(targets[i].data());
    }
  }
  History TargetHistory(int i) const {
    History h;
    for (int k = 0; k < kWindowDays; ++k) h[k] = targets[i][k];
    return h;
  }
};

TEST(Engine, MatchesReferenceForwardLossAndGradient) {
  std::mt19937_64 rng(8);
  const Params<double> p = RandomParams(SetNetConfig{}, rng);
  EngineFixture f(rng, 70);
  SetNetEngine<double> engine(16);
  std::vector<History> out(f.inputs.size());
  engine.Predict(p, f.in_ptrs, out);
  Params<double> ref_grad(p.config());
  ref_grad.SetZero();
  double ref_loss = 0.0;
  for (size_t i = 0; i < f.inputs.size(); ++i) {
    EXPECT_LT(MaxAbsDiff(out[i], ReferenceForward(f.inputs[i], p)), 1e-10);
    ref_loss += ReferenceLossAndGradient(f.inputs[i], f.TargetHistory(i), p, &ref_grad);
  }
  Params<double> grad(p.config());
  const double loss = engine.LossAndGradient(p, f.in_ptrs, f.t_ptrs, &grad);
  EXPECT_NEAR(loss, ref_loss, 1e-10 * ref_loss);
  EXPECT_NEAR(engine.Loss(p, f.in_ptrs, f.t_ptrs), ref_loss, 1e-10 * ref_loss);
  for (size_t k = 0; k < grad.size(); ++k) {
    EXPECT_NEAR(grad.data()[k], ref_grad.data()[k], 1e-9 + 1e-7 * std::abs(ref_grad.data()[k]))
        << "parameter " << k;
  }
}

TEST(Engine, FloatKernelsTrackDoubleReference) {
  std::mt19937_64 rng(9);
  const Params<double> p = RandomParams(SetNetConfig{}, rng);
  const Params<float> pf = p.Cast<float>();
  EngineFixture f(rng, 40);
  SetNetEngine<float> engine;
  std::vector<History> out(f.inputs.size());
  engine.Predict(pf, f.in_ptrs, out);
  for (size_t i = 0; i < f.inputs.size(); ++i) {
    EXPECT_LT(MaxAbsDiff(out[i], ReferenceForward(f.inputs[i], pf.Cast<double>())), 1e-4);
  }
}

TEST(Engine, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(10);
  const Params<float> p = RandomParams(SetNetConfig{}, rng).Cast<float>();
  EngineFixture f(rng, 150);
  const int saved = omp_get_max_threads();
  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    SetNetEngine<float> engine;
    Params<float> grad(p.config());
    const double loss = engine.LossAndGradient(p, f.in_ptrs, f.t_ptrs, &grad);
    return std::make_pair(loss, grad.data());
  };
  const auto one = run(1);
  const auto three = run(3);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.first, three.first);
  EXPECT_EQ(one.second, three.second);
}

TEST(Engine, ClusterOrderDoesNotChangePredictions) {
  std::mt19937_64 rng(11);
  const Params<float> p = RandomParams(SetNetConfig{}, rng).Cast<float>();
  SetInput in = RandomSetInput(rng, 12);
  SetInput shuffled = in;
  std::reverse(shuffled.clusters.begin(), shuffled.clusters.end());
  SetNetEngine<float> engine;
  const SetInput* ptrs[] = {&in, &shuffled};
  std::vector<History> out(2);
  engine.Predict(p, ptrs, out);
  EXPECT_LT(MaxAbsDiff(out[0], out[1]), 1e-6);
}

TEST(Params, JsonAndFileRoundTrip) {
  std::mt19937_64 rng(12);
  const Params<float> p = RandomParams(SetNetConfig{}, rng).Cast<float>();
  absl::StatusOr<Params<float>> back = ParamsFromJson(Json::parse(ParamsToJson(p).dump()));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->data(), p.data());
  EXPECT_EQ(back->config(), p.config());

  const std::string path =
      (std::filesystem::temp_directory_path() / "pct_params_roundtrip.json").string();
  ASSERT_TRUE(SaveParams(p, path).ok());
  absl::StatusOr<Params<float>> loaded = LoadParams(path);
  std::remove(path.c_str());
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  const SetInput in = RandomSetInput(rng);
  EXPECT_EQ(ReferenceForward(in, loaded->Cast<double>()), ReferenceForward(in, p.Cast<double>()));
}

TEST(Params, RejectsMalformedContainer) {
  std::mt19937_64 rng(13);
  Json j = ParamsToJson(RandomParams(SetNetConfig{}, rng).Cast<float>());
  j["tensors"][0]["data"].erase(0);
  EXPECT_FALSE(ParamsFromJson(j).ok());
}

TEST(LrSchedule, WarmupAndCosineEndpoints) {
  LrSchedule s;
  s.peak = 2e-4;
  s.floor = 8e-6;
  s.warmup_steps = 2500;
  s.cosine_steps = 50000;
  EXPECT_EQ(s.At(0), 0.0);
  EXPECT_EQ(s.At(2500), 2e-4);
  EXPECT_NEAR(s.At(1250), 1e-4, 1e-18);
  EXPECT_NEAR(s.At(2500 + 25000), (2e-4 + 8e-6) / 2, 1e-15);
  EXPECT_EQ(s.At(2500 + 50000), 8e-6);
  EXPECT_EQ(s.At(10'000'000), 8e-6);
  const LrSchedule desk;
  EXPECT_EQ(desk.warmup_steps, 200);
  EXPECT_EQ(desk.cosine_steps, 4000);
  EXPECT_EQ(TrainConfig{}.batch_size, 128);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(3);
  std::vector<float> params = {1.f, 1.f, 1.f};
  const std::vector<float> grad = {0.5f, -2.f, 0.f};
  adam.Step(grad, 0.1, params);
  EXPECT_NEAR(params[0], 0.9f, 1e-6);
  EXPECT_NEAR(params[1], 1.1f, 1e-6);
  EXPECT_EQ(params[2], 1.f);
}

struct TinyDataset {
  std::vector<SetInput> inputs;
  std::vector<Target> targets;
  SampleView view() const { return {inputs, targets}; }
};

// Targets depend on the symptom count of each day and the highest received
// level, so a working network can fit them.
TinyDataset MakeLearnable(std::mt19937_64& rng, int n) {
  TinyDataset d;
  for (int i = 0; i < n; ++i) {
    SetInput in = RandomSetInput(rng, 6);
    int max_level = 0;
    for (const Cluster& c : in.clusters) max_level = std::max(max_level, c.risk_level);
    Target t;
    for (int k = 0; k < kWindowDays; ++k) {
      const int symptoms = std::popcount(static_cast<unsigned>(in.statuses[k] & 0xfff));
      t[k] = static_cast<float>(0.08 * symptoms + 0.03 * max_level);
    }
    d.inputs.push_back(std::move(in));
    d.targets.push_back(t);
  }
  return d;
}

TrainConfig SmallTrainConfig(uint64_t seed) {
  TrainConfig c;
  c.net.width = 32;
  c.net.head_hidden = 16;
  c.net.num_blocks = 2;
  c.batch_size = 64;
  c.schedule.peak = 3e-3;
  c.schedule.floor = 1e-4;
  c.schedule.warmup_steps = 100;
  c.schedule.cosine_steps = 1900;
  c.eval_every = 250;
  c.patience = 100;
  c.seed = seed;
  return c;
}

TEST(Train, FixedSeedIsBitReproducible) {
  std::mt19937_64 rng(14);
  const TinyDataset train = MakeLearnable(rng, 200);
  const TinyDataset val = MakeLearnable(rng, 50);
  TrainConfig c = SmallTrainConfig(5);
  c.max_steps = 60;
  c.eval_every = 20;
  absl::StatusOr<TrainResult> a = Train(c, train.view(), val.view());
  absl::StatusOr<TrainResult> b = Train(c, train.view(), val.view());
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_EQ(a->best.data(), b->best.data());
  EXPECT_EQ(a->curve.size(), 3u);
}

TEST(Train, EmptyDatasetIsAnError) {
  TinyDataset empty;
  std::mt19937_64 rng(15);
  const TinyDataset val = MakeLearnable(rng, 10);
  EXPECT_FALSE(Train(SmallTrainConfig(1), empty.view(), val.view()).ok());
}

// Memorization probe on 512 samples with a narrowed network so that the
// suite stays fast; the full-width version runs in the acceptance binary.
TEST(Train, OverfitsASmallMemorizationSet) {
  std::mt19937_64 rng(16);
  const TinyDataset train = MakeLearnable(rng, 512);
  absl::StatusOr<TrainResult> r = Train(SmallTrainConfig(3), train.view(), train.view());
  ASSERT_TRUE(r.ok()) << r.status();
  const double mean_mse = MeanPredictorMse(MeanTarget(train.view()), train.view());
  const double mse = EvaluateMse(r->best, train.view());
  EXPECT_LT(mse, 0.1 * mean_mse) << "mse " << mse << " mean predictor " << mean_mse;
}

}  // namespace
}  // namespace pct
