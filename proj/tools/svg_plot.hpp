#pragma once

#include <string>
#include <utility>
#include <vector>

namespace odd::plot {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // meters
  bool dashed = false;
};

/// Static SVG 1.1 document with equal-aspect x/y axes in meters, tick labels
/// and a legend.
std::string xy_plot(const std::string& title, const std::vector<Series>& series,
                    int width = 640, int height = 640);

/// Tick spacing from the 1-2-5 sequence giving roughly `target` ticks.
double nice_step(double span, int target = 6);

}  // namespace odd::plot
