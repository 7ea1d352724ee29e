#ifndef PCT_COMMON_RNG_H_
#define PCT_COMMON_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pct {

// All randomness flows through std::mt19937_64 engines whose seeds are
// derived from a single master seed by hashing a path of stream tags:
//
//   seed(master, {t1, t2, ...}) = mix(...mix(mix(master) ^ t1) ^ t2 ...)
//
// where mix is the SplitMix64 finalizer. A child stream depends only on its
// own path, so adding seeds, runs or agents never perturbs existing streams.
using Rng = std::mt19937_64;

// Top-level stream tags. Values are part of the reproducibility contract.
enum class Stream : uint64_t {
  kPopulation = 1,
  kWorld = 2,
  kPredictor = 3,
  kScenario = 4,
  kRun = 5,
  kHandles = 6,
  kTraining = 7,
  kInit = 8,
  kBootstrap = 9,
  kCalibration = 10,
  kPipeline = 11,
};

uint64_t SplitMix64(uint64_t x);

uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path);

inline uint64_t DeriveSeed(uint64_t master, Stream stream,
                           std::initializer_list<uint64_t> path = {}) {
  uint64_t s = DeriveSeed(master, {static_cast<uint64_t>(stream)});
  return DeriveSeed(s, path);
}

inline Rng MakeRng(uint64_t master, Stream stream,
                   std::initializer_list<uint64_t> path = {}) {
  return Rng(DeriveSeed(master, stream, path));
}

inline double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool Bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace pct

#endif  // PCT_COMMON_RNG_H_
