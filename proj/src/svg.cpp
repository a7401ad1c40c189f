#include "cpce/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cpce {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

bool usable(double x, double y, bool log_y) {
  return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0);
}

}  // namespace

std::string render_chart(const std::vector<Series>& series, const ChartOptions& options) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!usable(s.x[k], s.y[k], options.log_y)) continue;
      const double y = options.log_y ? std::log10(s.y[k]) : s.y[k];
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) {
    const double v = options.log_y ? std::log10(y) : y;
    return kTop + (ymax - v) / (ymax - ymin) * plot_h;
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" +
         px(kHeight) + "\" viewBox=\"0 0 " + px(kWidth) + ' ' + px(kHeight) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
         "\" fill=\"white\"/>\n";
  if (!options.title.empty())
    out += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(options.title) + "</text>\n";

  // axes and ticks
  out += "<g stroke=\"black\" fill=\"none\">\n";
  out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop + plot_h) + "\" x2=\"" + px(kLeft + plot_w) +
         "\" y2=\"" + px(kTop + plot_h) + "\"/>\n";
  out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kTop) + "\" x2=\"" + px(kLeft) + "\" y2=\"" +
         px(kTop + plot_h) + "\"/>\n";
  out += "</g>\n<g font-size=\"11\" fill=\"black\">\n";
  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double fx = xmin + (xmax - xmin) * t / kTicks;
    const double X = sx(fx);
    out += "<line x1=\"" + px(X) + "\" y1=\"" + px(kTop + plot_h) + "\" x2=\"" + px(X) + "\" y2=\"" +
           px(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(X) + "\" y=\"" + px(kTop + plot_h + 18) + "\" text-anchor=\"middle\">" +
           fmt("%.3g", fx) + "</text>\n";
    const double fy = ymin + (ymax - ymin) * t / kTicks;
    const double Y = kTop + (ymax - fy) / (ymax - ymin) * plot_h;
    const double shown = options.log_y ? std::pow(10.0, fy) : fy;
    out += "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(Y) + "\" x2=\"" + px(kLeft) + "\" y2=\"" +
           px(Y) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(Y + 4) + "\" text-anchor=\"end\">" +
           fmt("%.3g", shown) + "</text>\n";
  }
  out += "</g>\n";
  if (!options.x_label.empty())
    out += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"" + px(kHeight - 15) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(options.x_label) + "</text>\n";
  if (!options.y_label.empty()) {
    const std::string label = options.log_y ? options.y_label + " (log)" : options.y_label;
    out += "<text x=\"18\" y=\"" + px(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + px(kTop + plot_h / 2) + ")\">" + escape(label) + "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const Series& ser = series[s];
    const std::string color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    const std::size_t count = std::min(ser.x.size(), ser.y.size());
    out += "<g class=\"series\" data-label=\"" + escape(ser.label) + "\">\n";
    if (options.lines) {
      std::string d;
      for (std::size_t k = 0; k < count; ++k) {
        if (!usable(ser.x[k], ser.y[k], options.log_y)) continue;
        d += (d.empty() ? "M" : " L") + px(sx(ser.x[k])) + ',' + px(sy(ser.y[k]));
      }
      if (!d.empty())
        out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }
    if (options.markers)
      for (std::size_t k = 0; k < count; ++k) {
        if (!usable(ser.x[k], ser.y[k], options.log_y)) continue;
        out += "<circle cx=\"" + px(sx(ser.x[k])) + "\" cy=\"" + px(sy(ser.y[k])) + "\" r=\"2.5\" fill=\"" +
               color + "\" data-x=\"" + fmt("%.17g", ser.x[k]) + "\" data-y=\"" +
               fmt("%.17g", ser.y[k]) + "\"/>\n";
      }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    const double lx = kLeft + plot_w + 15;
    out += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(lx + 20) + "\" y2=\"" + px(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + px(lx + 25) + "\" y=\"" + px(ly + 4) + "\" font-size=\"11\">" +
           escape(ser.label) + "</text>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace cpce
