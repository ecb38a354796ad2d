#pragma once

#include <string>
#include <vector>

namespace robustkb {

struct Series
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct LineChart
{
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::vector<Series> series;
};

/// Standalone SVG with axes, ticks, one polyline per series and a legend.
/// Infinite points are skipped; the output depends only on the inputs.
std::string render_svg(const LineChart& chart);
void write_svg(const std::string& path, const LineChart& chart);

}  // namespace robustkb
