#pragma once

#include <string>
#include <vector>

namespace qpg::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  int axis = 0;  // 0 = left scale, 1 = right scale
};

// Vertical background band over [x0, x1] in data coordinates.
struct Band {
  double x0 = 0.0;
  double x1 = 0.0;
  std::string color = "#dddddd";
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string y2_label;  // right axis, set when any series uses axis 1
  int width = 760;
  int height = 420;
};

// Self-contained SVG line chart: one polyline per series, optional shaded
// bands, axes and a small legend. Deterministic text output.
void write_line_chart(const std::string& path, const ChartSpec& spec,
                      const std::vector<Series>& series, const std::vector<Band>& bands = {});

}  // namespace qpg::svg
