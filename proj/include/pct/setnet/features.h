#ifndef PCT_SETNET_FEATURES_H_
#define PCT_SETNET_FEATURES_H_

#include <array>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/tracing/observables.h"

namespace pct {

// Width of the encoded daily status: 12 symptom bits, visible positive
// test, visible negative test, valid-day flag.
inline constexpr int kStatusFeatures = kNumSymptoms + 3;
// Width of the encoded profile: age / 100, one-hot sex, condition flags.
inline constexpr int kProfileFeatures = 1 + 3 + kNumConditions;

inline constexpr int kStatusPositiveBit = kNumSymptoms;
inline constexpr int kStatusNegativeBit = kNumSymptoms + 1;
inline constexpr int kStatusValidBit = kNumSymptoms + 2;

// Compact network input derived from Observables. statuses[k] packs the
// kStatusFeatures bits of day today - k.
struct SetInput {
  std::array<uint16_t, kWindowDays> statuses{};
  uint8_t age = 0;
  uint8_t sex = 0;
  uint8_t conditions = 0;
  std::vector<Cluster> clusters;

  bool operator==(const SetInput&) const = default;
};

SetInput EncodeObservables(const Observables& obs);

// Dense encodings written into caller-provided rows.
void EncodeStatus(uint16_t bits, float* out);
void EncodeStatus(uint16_t bits, double* out);
void EncodeProfile(const SetInput& input, float* out);
void EncodeProfile(const SetInput& input, double* out);

// Sinusoidal count encoding: out[2i] = sin(n / 10000^i) and
// out[2i+1] = cos(n / 10000^i) for i < dim / 2. Only the first few pairs
// vary noticeably with realistic counts; the rest are constant features.
absl::StatusOr<std::vector<double>> EncodeCount(int n, int dim);
// Unchecked variant; dim must be even.
void EncodeCountInto(int n, int dim, double* out);

}  // namespace pct

#endif  // PCT_SETNET_FEATURES_H_
