#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace odd::plot {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double nice_step(double span, int target) {
  if (!(span > 0.0) || !std::isfinite(span)) return 1.0;
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string xy_plot(const std::string& title, const std::vector<Series>& series, int width,
                    int height) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  // Equal aspect: grow the narrower axis around its center.
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-3}) * 1.1;
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  xmin = cx - 0.5 * span;
  xmax = cx + 0.5 * span;
  ymin = cy - 0.5 * span;
  ymax = cy + 0.5 * span;

  const double left = 70.0;
  const double right = 20.0;
  const double top = 40.0;
  const double bottom = 50.0;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  const double side = std::min(pw, ph);
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * side; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * side; };

  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
      "text-anchor=\"middle\">{}</text>\n",
      width, height, width, height, left + 0.5 * side, escape(title));

  const double step = nice_step(span);
  out += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double v = std::ceil(xmin / step) * step; v <= xmax + 1e-12; v += step) {
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n",
                       px(v), top, top + side);
  }
  for (double v = std::ceil(ymin / step) * step; v <= ymax + 1e-12; v += step) {
    out += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\"/>\n",
                       py(v), left, left + side);
  }
  out += "</g>\n";
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      left, top, side, side);

  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v = std::ceil(xmin / step) * step; v <= xmax + 1e-12; v += step) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                       px(v), top + side + 15, std::abs(v) < 1e-12 ? 0.0 : v);
  }
  for (double v = std::ceil(ymin / step) * step; v <= ymax + 1e-12; v += step) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n",
                       left - 6, py(v) + 4, std::abs(v) < 1e-12 ? 0.0 : v);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">x_E [m]</text>\n",
                     left + 0.5 * side, top + side + 35);
  out += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">"
      "y_E [m]</text>\n",
      top + 0.5 * side);
  out += "</g>\n";

  for (const auto& s : series) {
    if (s.points.empty()) continue;
    std::string pts;
    for (const auto& [x, y] : s.points) pts += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
        s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "", pts);
  }

  double ly = top + 16;
  for (const auto& s : series) {
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"{4}/>\n"
        "<text x=\"{5:.2f}\" y=\"{6:.2f}\" font-family=\"sans-serif\" font-size=\"11\">{7}</text>\n",
        left + 10, ly, left + 34, s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "", left + 40,
        ly + 4, escape(s.label));
    ly += 16;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace odd::plot
