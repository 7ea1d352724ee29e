#include "pct/metrics/plots.h"

#include <algorithm>
#include <fstream>

#include "absl/strings/str_cat.h"

namespace pct {
namespace {

absl::Status OpenFor(const std::filesystem::path& path, std::ofstream& out) {
  out.open(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

}  // namespace

absl::Status WriteParetoPlot(const std::filesystem::path& dir,
                             const std::vector<std::pair<std::string, ParetoTable>>& tables) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream script;
  if (auto s = OpenFor(dir / "pareto.gp", script); !s.ok()) return s;
  script << "set terminal pngcairo size 900,600\n"
         << "set output 'pareto.png'\n"
         << "set xlabel 'contacts per day'\n"
         << "set ylabel 'R'\n"
         << "set key top left\n"
         << "plot ";
  bool first = true;
  for (const auto& [method, table] : tables) {
    const std::string file = absl::StrCat("pareto_", method, ".dat");
    std::ofstream data;
    if (auto s = OpenFor(dir / file, data); !s.ok()) return s;
    data << "# contacts mean_r se_r n\n";
    for (const ParetoBin& b : table.bins) {
      data << b.mean_contacts << ' ' << b.mean_r << ' ' << b.se_r << ' ' << b.n << '\n';
    }
    script << (first ? "" : ", \\\n     ") << '\'' << file
           << "' using 1:2:3 with yerrorlines title '" << method << '\'';
    first = false;
  }
  script << '\n';
  return absl::OkStatus();
}

absl::Status WriteSeriesPlot(const std::filesystem::path& dir, const std::vector<RunSummary>& runs,
                             bool false_quarantine) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string stem = false_quarantine ? "quarantine" : "cases";
  size_t days = 0;
  for (const RunSummary& r : runs) days = std::max(days, r.series.size());
  std::ofstream data;
  if (auto s = OpenFor(dir / (stem + ".dat"), data); !s.ok()) return s;
  data << "day";
  for (const RunSummary& r : runs) data << ' ' << r.method << '_' << r.seed;
  data << '\n';
  for (size_t d = 0; d < days; ++d) {
    data << d;
    for (const RunSummary& r : runs) {
      if (d >= r.series.size()) {
        data << " NaN";
      } else if (false_quarantine) {
        data << ' ' << r.series[d].false_quarantine;
      } else {
        data << ' ' << r.series[d].cumulative_cases;
      }
    }
    data << '\n';
  }
  std::ofstream script;
  if (auto s = OpenFor(dir / (stem + ".gp"), script); !s.ok()) return s;
  script << "set terminal pngcairo size 900,600\n"
         << "set output '" << stem << ".png'\n"
         << "set xlabel 'day'\n"
         << "set ylabel '" << (false_quarantine ? "false quarantine fraction" : "cumulative cases")
         << "'\n"
         << "plot for [i=2:" << runs.size() + 1 << "] '" << stem
         << ".dat' using 1:i with lines title columnhead(i)\n";
  return absl::OkStatus();
}

absl::Status WriteErrorBarPlot(const std::filesystem::path& dir, const std::string& stem,
                               const std::string& xlabel, const std::string& ylabel,
                               const std::vector<ErrorBarSeries>& series) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream script;
  if (auto s = OpenFor(dir / (stem + ".gp"), script); !s.ok()) return s;
  script << "set terminal pngcairo size 900,600\n"
         << "set output '" << stem << ".png'\n"
         << "set xlabel '" << xlabel << "'\n"
         << "set ylabel '" << ylabel << "'\n"
         << "plot ";
  bool first = true;
  for (const ErrorBarSeries& sr : series) {
    const std::string file = absl::StrCat(stem, "_", sr.name, ".dat");
    std::ofstream data;
    if (auto s = OpenFor(dir / file, data); !s.ok()) return s;
    data << "# x y y_error\n";
    for (const auto& p : sr.points) data << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    script << (first ? "" : ", \\\n     ") << '\'' << file
           << "' using 1:2:3 with yerrorlines title '" << sr.name << '\'';
    first = false;
  }
  script << '\n';
  return absl::OkStatus();
}

absl::Status WriteBoxPlot(const std::filesystem::path& dir, const std::string& stem,
                          const std::string& ylabel, const std::vector<std::string>& names,
                          const std::vector<BootstrapSummary>& boxes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream data;
  if (auto s = OpenFor(dir / (stem + ".dat"), data); !s.ok()) return s;
  data << "# index name q1 median q3\n";
  for (size_t i = 0; i < names.size(); ++i) {
    data << i + 1 << ' ' << names[i] << ' ' << boxes[i].q1 << ' ' << boxes[i].median << ' '
         << boxes[i].q3 << '\n';
  }
  std::ofstream script;
  if (auto s = OpenFor(dir / (stem + ".gp"), script); !s.ok()) return s;
  script << "set terminal pngcairo size 900,600\n"
         << "set output '" << stem << ".png'\n"
         << "set ylabel '" << ylabel << "'\n"
         << "set boxwidth 0.4\n"
         << "set xrange [0:" << names.size() + 1 << "]\n"
         << "plot '" << stem
         << ".dat' using 1:3:3:5:5:xticlabels(2) with candlesticks notitle, \\\n"
         << "     '' using 1:4:4:4:4 with candlesticks lt -1 notitle\n";
  return absl::OkStatus();
}

}  // namespace pct
