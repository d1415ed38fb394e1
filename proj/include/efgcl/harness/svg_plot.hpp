#pragma once

#include <string>
#include <vector>

namespace efgcl::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> spread;  // optional half-width band around y
  std::string color = "#1f77b4";
};

/// Static learning-curve figure: axes, tick labels, one polyline per series
/// with an optional shaded band, and a legend.
std::string render_svg(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);
void write_svg(const std::string& path, const std::vector<Series>& series, const std::string& title,
               const std::string& x_label, const std::string& y_label);

}  // namespace efgcl::harness
