#ifndef PCT_METRICS_PLOTS_H_
#define PCT_METRICS_PLOTS_H_

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "pct/metrics/metrics.h"

namespace pct {

// Writes one whitespace-separated data file per method
// (contacts mean_r se_r n) plus pareto.gp, an error-bar plot of R against
// contacts/day. Render with `gnuplot pareto.gp`.
absl::Status WriteParetoPlot(const std::filesystem::path& dir,
                             const std::vector<std::pair<std::string, ParetoTable>>& tables);

// Writes <stem>.dat (day followed by one column per run) and <stem>.gp.
// `false_quarantine` selects the false-quarantine series instead of
// cumulative cases.
absl::Status WriteSeriesPlot(const std::filesystem::path& dir, const std::vector<RunSummary>& runs,
                             bool false_quarantine);

// One (x, y, y_error) series per name, drawn with error bars into
// <stem>.gp from <stem>_<name>.dat.
struct ErrorBarSeries {
  std::string name;
  std::vector<std::array<double, 3>> points;
};
absl::Status WriteErrorBarPlot(const std::filesystem::path& dir, const std::string& stem,
                               const std::string& xlabel, const std::string& ylabel,
                               const std::vector<ErrorBarSeries>& series);

// Box per method from bootstrap quartiles: writes <stem>.dat with
// index, name, q1, median, q3 and a candlestick script.
absl::Status WriteBoxPlot(const std::filesystem::path& dir, const std::string& stem,
                          const std::string& ylabel, const std::vector<std::string>& names,
                          const std::vector<BootstrapSummary>& boxes);

}  // namespace pct

#endif  // PCT_METRICS_PLOTS_H_
