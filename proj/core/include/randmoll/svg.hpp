#pragma once

#include <string>
#include <vector>

namespace randmoll {

/// Minimal line plot: one polyline per series over a shared x column.
void write_svg_line_plot(const std::string& file_path, const std::string& title,
                         const std::vector<double>& x,
                         const std::vector<std::vector<double>>& series,
                         const std::vector<std::string>& labels);

}  // namespace randmoll
