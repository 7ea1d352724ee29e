#include "pct/setnet/features.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace pct {
namespace {

template <typename T>
void EncodeStatusT(uint16_t bits, T* out) {
  for (int k = 0; k < kStatusFeatures; ++k) out[k] = static_cast<T>((bits >> k) & 1u);
}

template <typename T>
void EncodeProfileT(const SetInput& input, T* out) {
  out[0] = static_cast<T>(input.age) / static_cast<T>(100);
  for (int s = 0; s < 3; ++s) out[1 + s] = static_cast<T>(input.sex == s ? 1 : 0);
  for (int c = 0; c < kNumConditions; ++c) {
    out[4 + c] = static_cast<T>((input.conditions >> c) & 1u);
  }
}

}  // namespace

SetInput EncodeObservables(const Observables& obs) {
  SetInput in;
  for (int k = 0; k < kWindowDays; ++k) {
    const HealthStatus& s = obs.statuses[k];
    uint16_t bits = static_cast<uint16_t>(s.reported_symptoms.to_ulong());
    if (s.test_result == TestResult::kPositive) bits |= 1u << kStatusPositiveBit;
    if (s.test_result == TestResult::kNegative) bits |= 1u << kStatusNegativeBit;
    if (obs.today - k >= 0) bits |= 1u << kStatusValidBit;
    in.statuses[k] = bits;
  }
  in.age = static_cast<uint8_t>(std::clamp(obs.profile.age, 0, 100));
  in.sex = static_cast<uint8_t>(obs.profile.sex);
  in.conditions = static_cast<uint8_t>(obs.profile.conditions.to_ulong());
  in.clusters = obs.clusters;
  return in;
}

void EncodeStatus(uint16_t bits, float* out) { EncodeStatusT(bits, out); }
void EncodeStatus(uint16_t bits, double* out) { EncodeStatusT(bits, out); }
void EncodeProfile(const SetInput& input, float* out) { EncodeProfileT(input, out); }
void EncodeProfile(const SetInput& input, double* out) { EncodeProfileT(input, out); }

void EncodeCountInto(int n, int dim, double* out) {
  for (int i = 0; i < dim / 2; ++i) {
    const double x = n / std::pow(10000.0, i);
    out[2 * i] = std::sin(x);
    out[2 * i + 1] = std::cos(x);
  }
}

absl::StatusOr<std::vector<double>> EncodeCount(int n, int dim) {
  if (dim <= 0 || dim % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("count encoding width must be even, got ", dim));
  }
  if (n < 0) return absl::InvalidArgumentError("count must be non-negative");
  std::vector<double> out(dim);
  EncodeCountInto(n, dim, out.data());
  return out;
}

}  // namespace pct
