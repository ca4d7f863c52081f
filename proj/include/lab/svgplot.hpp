#pragma once

#include <string>
#include <vector>

namespace lab::harness {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Self-contained SVG line chart: auto-scaled axes, tick labels, a legend,
// and one polyline per series.  No external renderer involved — the figures
// are static artifacts.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           int width = 760, int height = 480);

// Long-form CSV of exactly the numbers the chart draws: series,x,y.
std::string series_to_csv(const std::vector<Series>& series);

}  // namespace lab::harness
