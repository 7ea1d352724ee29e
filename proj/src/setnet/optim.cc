#include "pct/setnet/optim.h"

#include <cmath>
#include <numbers>

#include "pct/common/check.h"

namespace pct {

double LrSchedule::At(int step) const {
  if (step <= 0) return 0.0;
  if (step < warmup_steps) return peak * static_cast<double>(step) / warmup_steps;
  const int t = step - warmup_steps;
  if (t >= cosine_steps) return floor;
  const double progress = static_cast<double>(t) / cosine_steps;
  return floor + (peak - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

Adam::Adam(size_t size, AdamConfig config) : config_(config), m_(size, 0.f), v_(size, 0.f) {}

void Adam::Step(std::span<const float> grad, double lr, std::span<float> params) {
  PCT_CHECK(grad.size() == m_.size() && params.size() == m_.size(), "optimizer size mismatch");
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, t_);
  const double c2 = 1.0 - std::pow(b2, t_);
  const float step = static_cast<float>(lr / c1);
  const float inv_c2 = static_cast<float>(1.0 / c2);
  const float fb1 = static_cast<float>(b1);
  const float fb2 = static_cast<float>(b2);
  const float eps = static_cast<float>(config_.epsilon);
  float* p = params.data();
  for (size_t i = 0; i < m_.size(); ++i) {
    const float g = grad[i];
    m_[i] = fb1 * m_[i] + (1.f - fb1) * g;
    v_[i] = fb2 * v_[i] + (1.f - fb2) * g * g;
    p[i] -= step * m_[i] / (std::sqrt(v_[i] * inv_c2) + eps);
  }
}

}  // namespace pct
