#pragma once

#include <string>
#include <utility>
#include <vector>

namespace evfcr {

// Small hand-rolled SVG charts; CSV artifacts are the contract, these are
// a convenience for eyeballing runs.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<std::pair<std::string, std::vector<double>>>& series,
                          const std::string& y_label);

void write_bar_chart_svg(const std::string& path, const std::string& title,
                         const std::vector<std::pair<std::string, double>>& bars,
                         const std::string& y_label);

}  // namespace evfcr
