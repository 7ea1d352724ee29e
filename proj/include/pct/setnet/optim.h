#ifndef PCT_SETNET_OPTIM_H_
#define PCT_SETNET_OPTIM_H_

#include <span>
#include <vector>

#include "pct/setnet/params.h"

namespace pct {

// Linear warmup from 0 to `peak` over `warmup_steps`, then cosine decay to
// `floor` over `cosine_steps`, constant afterwards.
struct LrSchedule {
  double peak = 2e-4;
  double floor = 8e-6;
  int warmup_steps = 200;
  int cosine_steps = 4000;

  double At(int step) const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments start at zero.
class Adam {
 public:
  Adam(size_t size, AdamConfig config = {});

  void Step(std::span<const float> grad, double lr, std::span<float> params);
  int steps() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<float> m_, v_;
  int t_ = 0;
};

}  // namespace pct

#endif  // PCT_SETNET_OPTIM_H_
