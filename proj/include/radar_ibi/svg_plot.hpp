#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "radar_ibi/errors.hpp"

namespace radar_ibi {

enum class PlotStyle { line, scatter };

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  PlotStyle style = PlotStyle::line;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 800;
  int height = 480;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

inline std::string fmt(double v, const char* f = "%.4g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Roughly `target` round-valued ticks covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
  return ticks;
}

}  // namespace detail

/// Standalone SVG chart; non-finite points are skipped.
inline std::string render_svg(const Plot& plot) {
  constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    detail::require(s.x.size() == s.y.size(), "plot series '" + s.name + "' has mismatched x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = plot.width - left - right, ph = plot.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) +
                    "\" height=\"" + std::to_string(plot.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fmt(plot.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::xml_escape(plot.title) + "</text>\n";
  svg += "<rect x=\"" + detail::fmt(left) + "\" y=\"" + detail::fmt(top) + "\" width=\"" + detail::fmt(pw) +
         "\" height=\"" + detail::fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : detail::nice_ticks(x0, x1)) {
    const auto x = detail::fmt(px(t));
    svg += "<line x1=\"" + x + "\" y1=\"" + detail::fmt(top + ph) + "\" x2=\"" + x + "\" y2=\"" +
           detail::fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + detail::fmt(top + ph + 18) + "\" text-anchor=\"middle\">" +
           detail::fmt(t) + "</text>\n";
  }
  for (double t : detail::nice_ticks(y0, y1)) {
    const auto y = detail::fmt(py(t));
    svg += "<line x1=\"" + detail::fmt(left - 5) + "\" y1=\"" + y + "\" x2=\"" + detail::fmt(left) + "\" y2=\"" + y +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::fmt(left - 8) + "\" y=\"" + y + "\" text-anchor=\"end\" dy=\"4\">" +
           detail::fmt(t) + "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"" + detail::fmt(plot.height - 15.0) +
         "\" text-anchor=\"middle\">" + detail::xml_escape(plot.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + detail::fmt(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + detail::xml_escape(plot.y_label) + "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::string colour = palette[k % std::size(palette)];
    if (s.style == PlotStyle::line) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        pts += detail::fmt(px(s.x[i]), "%.2f") + "," + detail::fmt(py(s.y[i]), "%.2f") + " ";
      }
      svg += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        svg += "<circle cx=\"" + detail::fmt(px(s.x[i]), "%.2f") + "\" cy=\"" + detail::fmt(py(s.y[i]), "%.2f") +
               "\" r=\"2.5\" fill=\"" + colour + "\"/>\n";
      }
    }
    svg += "<text x=\"" + detail::fmt(left + pw - 10) + "\" y=\"" + detail::fmt(top + 16.0 + 16.0 * k) +
           "\" text-anchor=\"end\" fill=\"" + colour + "\">" + detail::xml_escape(s.name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace radar_ibi
