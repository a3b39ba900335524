#pragma once

// Standalone SVG line charts. One <polyline> per series, fixed canvas, fixed
// palette and printf-based number formatting, so identical inputs render to
// identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "hdcb/contract.hpp"

namespace hdcb {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
};

namespace detail {

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline const char* palette(std::size_t i) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

}  // namespace detail

inline std::string render_line_chart(const std::vector<Series>& series, const ChartSpec& spec) {
  require(!series.empty(), "render_line_chart: no series");
  for (const auto& s : series) {
    require(!s.x.empty() && s.x.size() == s.y.size(),
            "render_line_chart: series '" + s.name + "' is empty or ragged");
  }

  constexpr double kLeft = 70.0;
  constexpr double kRight = 650.0;
  constexpr double kTop = 50.0;
  constexpr double kBottom = 440.0;

  double x_min = series[0].x[0], x_max = x_min;
  double y_min = series[0].y[0], y_max = y_min;
  for (const auto& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (x_min == x_max) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (y_min == y_max) {
    const double pad = std::max(1.0, std::abs(y_min) * 0.1);
    y_min -= pad;
    y_max += pad;
  }

  const auto sx = [&](double v) {
    return kLeft + (v - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto sy = [&](double v) {
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"500\" "
         "viewBox=\"0 0 860 500\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"860\" height=\"500\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"360\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + spec.title + "</text>\n";

  // axes
  svg += "<line x1=\"" + detail::fmt_coord(kLeft) + "\" y1=\"" + detail::fmt_coord(kBottom) +
         "\" x2=\"" + detail::fmt_coord(kRight) + "\" y2=\"" + detail::fmt_coord(kBottom) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + detail::fmt_coord(kLeft) + "\" y1=\"" + detail::fmt_coord(kTop) +
         "\" x2=\"" + detail::fmt_coord(kLeft) + "\" y2=\"" + detail::fmt_coord(kBottom) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  for (int i = 0; i < 5; ++i) {
    const double fx = x_min + i * (x_max - x_min) / 4.0;
    const double px = sx(fx);
    svg += "<line x1=\"" + detail::fmt_coord(px) + "\" y1=\"" + detail::fmt_coord(kBottom) +
           "\" x2=\"" + detail::fmt_coord(px) + "\" y2=\"" + detail::fmt_coord(kBottom + 5) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt_coord(px) + "\" y=\"" + detail::fmt_coord(kBottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::fmt_tick(fx) + "</text>\n";

    const double fy = y_min + i * (y_max - y_min) / 4.0;
    const double py = sy(fy);
    svg += "<line x1=\"" + detail::fmt_coord(kLeft - 5) + "\" y1=\"" + detail::fmt_coord(py) +
           "\" x2=\"" + detail::fmt_coord(kLeft) + "\" y2=\"" + detail::fmt_coord(py) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt_coord(kLeft - 10) + "\" y=\"" + detail::fmt_coord(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::fmt_tick(fy) + "</text>\n";
  }

  svg += "<text x=\"360\" y=\"478\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + spec.x_label + "</text>\n";
  svg += "<text x=\"20\" y=\"245\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 245)\">" + spec.y_label + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += detail::palette(s);
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i) svg += ' ';
      svg += detail::fmt_coord(sx(series[s].x[i]));
      svg += ',';
      svg += detail::fmt_coord(sy(series[s].y[i]));
    }
    svg += "\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = 60.0 + 22.0 * static_cast<double>(s);
    svg += "<rect x=\"665\" y=\"" + detail::fmt_coord(ly - 9) +
           "\" width=\"14\" height=\"14\" fill=\"";
    svg += detail::palette(s);
    svg += "\"/>\n";
    svg += "<text x=\"685\" y=\"" + detail::fmt_coord(ly + 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + series[s].name + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace hdcb
