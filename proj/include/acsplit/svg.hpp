#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace acsplit {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  /// Written verbatim as an XML comment block at the top of the file.
  std::vector<std::string> notes;
};

/// Minimal polyline plot. Non-finite points (and non-positive ones on log
/// axes) are dropped.
void write_line_plot(const std::filesystem::path& path, const PlotSpec& spec,
                     const std::vector<Series>& series);

}  // namespace acsplit
