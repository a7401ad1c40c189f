#pragma once

#include <string>
#include <vector>

namespace cpce {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool markers = true;  // a <circle> per point
  bool lines = true;    // a <path> per series
};

/// Self-contained SVG chart. Each marker carries data-x / data-y with the
/// exact values it plots. Points with non-finite coordinates, or y <= 0 on a
/// log axis, are skipped. Output depends only on the inputs.
std::string render_chart(const std::vector<Series>& series, const ChartOptions& options);

}  // namespace cpce
