#ifndef PCT_PIPELINE_CALIBRATE_H_
#define PCT_PIPELINE_CALIBRATE_H_

#include <array>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "pct/pipeline/dataset.h"
#include "pct/tracing/risk.h"

namespace pct {

struct BinCalibration {
  RiskBinTable table = RiskBinTable::Uniform();
  // Encounter-message risk values from the fitting runs and from a disjoint
  // set of held-out runs.
  std::vector<double> fit_risks;
  std::vector<double> heldout_risks;
  std::array<double, kNumRiskLevels> heldout_mass{};
  Json manifest;
};

// Runs noisy-oracle simulations on calibration seeds disjoint from the
// dataset seeds (scenario stream kCalibration) and fits equal-mass bins to
// the risk values carried by their encounter messages. Run j < fit_runs is
// used for fitting and the next heldout_runs runs are held out.
absl::StatusOr<BinCalibration> CalibrateBins(const GenerateConfig& config, int fit_runs,
                                             int heldout_runs);

struct MobilityCalibration {
  double mobility = 0.0;
  double contacts = 0.0;
  int evaluations = 0;
};

// Bisects the mobility factor until the mean contacts/day over `seeds`
// under `method` matches `target_contacts`. Contacts grow with mobility, so
// [lo, hi] must bracket the target.
absl::StatusOr<MobilityCalibration> CalibrateMobility(const WorldConfig& world,
                                                      const ScenarioParams& base,
                                                      const MethodConfig& method,
                                                      double target_contacts,
                                                      std::span<const uint64_t> seeds,
                                                      double lo = 0.1, double hi = 2.0,
                                                      int iterations = 10);

// Mean contacts/day over one run per seed, in parallel.
absl::StatusOr<double> MeanContacts(const WorldConfig& world, const ScenarioParams& base,
                                    const MethodConfig& method, std::span<const uint64_t> seeds);

}  // namespace pct

#endif  // PCT_PIPELINE_CALIBRATE_H_
