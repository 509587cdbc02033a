#include "sobvem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace sobvem {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;  // log10 bounds
  double hi = 1.0;
  double pix_lo = 0.0;
  double pix_hi = 1.0;

  double map(double v) const {
    return pix_lo + (std::log10(v) - lo) / (hi - lo) * (pix_hi - pix_lo);
  }
};

} // namespace

std::string format_loglog_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = 0.0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("plot series '" + s.label + "' has mismatched sizes");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] > 0.0 && s.y[i] > 0.0) {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (!(xmax > 0.0) || !(ymax > 0.0)) {
    throw std::invalid_argument("plot needs positive data");
  }
  Axis ax, ay;
  ax.lo = std::floor(std::log10(xmin));
  ax.hi = std::ceil(std::log10(xmax));
  if (ax.hi <= ax.lo) ax.hi = ax.lo + 1.0;
  ay.lo = std::floor(std::log10(ymin));
  ay.hi = std::ceil(std::log10(ymax));
  if (ay.hi <= ay.lo) ay.hi = ay.lo + 1.0;
  ax.pix_lo = options.x_decreasing ? kWidth - kRight : kLeft;
  ax.pix_hi = options.x_decreasing ? kLeft : kWidth - kRight;
  ay.pix_lo = kHeight - kBottom;
  ay.pix_hi = kTop;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"25\" text-anchor=\"middle\" "
         "font-size=\"15\">" + escape(options.title) + "</text>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kWidth - kLeft - kRight) + "\" height=\"" + num(kHeight - kTop - kBottom) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int d = static_cast<int>(ax.lo); d <= static_cast<int>(ax.hi); ++d) {
    const double px = ax.map(std::pow(10.0, d));
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px) + "\" y2=\"" +
           num(kHeight - kBottom) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kHeight - kBottom + 18) +
           "\" text-anchor=\"middle\">1e" + std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(ay.lo); d <= static_cast<int>(ay.hi); ++d) {
    const double py = ay.map(std::pow(10.0, d));
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kWidth - kRight) +
           "\" y2=\"" + num(py) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\">1e" + std::to_string(d) + "</text>\n";
  }
  svg += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" text-anchor=\"middle\">" + escape(options.x_label) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + num((kTop + kHeight - kBottom) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num((kTop + kHeight - kBottom) / 2) + ")\">" + escape(options.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!(series[s].x[i] > 0.0 && series[s].y[i] > 0.0)) {
        continue;
      }
      const double px = ax.map(series[s].x[i]);
      const double py = ay.map(series[s].y[i]);
      pts += num(px) + "," + num(py) + " ";
      svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 15.0 + 18.0 * static_cast<double>(s);
    const double lx = kWidth - kRight + 12.0;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\">" +
           escape(series[s].label) + "</text>\n";
  }

  // Slope triangles stacked near the small-error corner, one decade wide in
  // x when the axis allows it.
  const double span = std::min(1.0, 0.25 * (ax.hi - ax.lo));
  for (std::size_t i = 0; i < options.reference_slopes.size(); ++i) {
    const double slope = options.reference_slopes[i];
    const double x0 = std::pow(10.0, std::log10(xmin) + 0.1 * (ax.hi - ax.lo));
    const double x1 = x0 * std::pow(10.0, span);
    const double y0 = std::pow(10.0, ay.lo + 0.08 * (ay.hi - ay.lo) +
                                          0.3 * static_cast<double>(i) * (ay.hi - ay.lo));
    const double y1 = y0 * std::pow(10.0, slope * span);
    const double px0 = ax.map(x0), px1 = ax.map(x1);
    const double py0 = ay.map(y0), py1 = ay.map(y1);
    svg += "<polygon points=\"" + num(px0) + "," + num(py0) + " " + num(px1) + "," + num(py0) +
           " " + num(px1) + "," + num(py1) + "\" fill=\"none\" stroke=\"#555555\" "
           "stroke-dasharray=\"4,3\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%g", slope);
    svg += "<text x=\"" + num(px1 + (px1 > px0 ? 6 : -6)) + "\" y=\"" + num(0.5 * (py0 + py1)) +
           "\" text-anchor=\"" + (px1 > px0 ? "start" : "end") + "\" fill=\"#555555\">" + label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

} // namespace sobvem
