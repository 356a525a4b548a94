#pragma once

#include <string>
#include <vector>

namespace ctrpo {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG line chart (axes, ticks, legend). Series with
/// mismatched or empty x/y are rejected.
void write_line_chart_svg(const std::string& path, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace ctrpo
