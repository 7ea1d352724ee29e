#ifndef PCT_SETNET_REFERENCE_H_
#define PCT_SETNET_REFERENCE_H_

#include <vector>

#include "pct/predict/recommend.h"
#include "pct/setnet/features.h"
#include "pct/setnet/params.h"

namespace pct {

// Straightforward single-sample implementation written with plain loops.
// It shares no code with the batched kernels and serves as their oracle in
// tests and as the serial baseline in benchmarks.

// The projected set: one row per element. day_index[r] is the day offset
// for day elements and -1 for encounter elements.
struct ElementSet {
  std::vector<std::vector<double>> elements;
  std::vector<int> day_index;
};

ElementSet BuildInputSet(const SetInput& input, const Params<double>& params);

// Runs the set blocks and the head over an arbitrary ordering of elements.
History ReferenceForwardSet(const ElementSet& set, const Params<double>& params);
History ReferenceForward(const SetInput& input, const Params<double>& params);

// Loss of one sample (mean over the 15 entries); adds its gradient to
// `grad` when non-null.
double ReferenceLossAndGradient(const SetInput& input, const History& target,
                                const Params<double>& params, Params<double>* grad);

}  // namespace pct

#endif  // PCT_SETNET_REFERENCE_H_
