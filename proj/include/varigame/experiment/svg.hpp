#pragma once

#include <string>
#include <vector>

namespace varigame::experiment {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Plain line chart with axes, tick labels and a legend.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

void write_text_file(const std::string& path, const std::string& text);

} // namespace varigame::experiment
