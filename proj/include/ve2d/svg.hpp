#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ve2d {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Minimal line plot. Points with non-finite coordinates, and non-positive
/// ones on a log axis, are skipped.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ve2d
