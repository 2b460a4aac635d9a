#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "otcap/bounds.hpp"

namespace otcap {

// Self-contained 800x600 line chart of the three sweep curves.
inline std::string sweep_svg(const std::vector<SweepRow>& rows) {
  const double W = 800, H = 600;
  const double ml = 70, mr = 30, mt = 40, mb = 60;  // margins
  double ymax = 1e-9;
  for (const auto& r : rows)
    ymax = std::max({ymax, r.new_upper, r.ac13_upper, r.erasure_lower});
  ymax *= 1.08;

  auto sx = [&](double t) { return ml + t * (W - ml - mr); };
  auto sy = [&](double v) { return H - mb - v / ymax * (H - mt - mb); };

  auto polyline = [&](const char* color, auto pick) {
    std::string pts;
    char buf[64];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(r.t), sy(pick(r)));
      pts += buf;
    }
    return "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  s += "  <rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  char buf[256];
  // axes
  std::snprintf(buf, sizeof buf,
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  s += buf;
  // ticks
  for (int i = 0; i <= 10; ++i) {
    double t = i / 10.0;
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">%.1f</text>\n",
                  sx(t), H - mb, sx(t), H - mb + 5, sx(t), H - mb + 20, t);
    s += buf;
  }
  for (int i = 0; i <= 4; ++i) {
    double v = ymax * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">%.3f</text>\n",
                  ml - 5, sy(v), ml, sy(v), ml - 8, sy(v) + 4, v);
    s += buf;
  }
  s += "  <text x=\"400\" y=\"585\" font-size=\"14\" text-anchor=\"middle\">t</text>\n";
  s += "  <text x=\"18\" y=\"300\" font-size=\"14\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 18 300)\">bits per channel use</text>\n";

  s += polyline("#d62728", [](const SweepRow& r) { return r.ac13_upper; });
  s += polyline("#1f77b4", [](const SweepRow& r) { return r.new_upper; });
  s += polyline("#2ca02c", [](const SweepRow& r) { return r.erasure_lower; });

  // legend
  const char* names[3] = {"ac13_upper", "new_upper", "erasure_lower"};
  const char* colors[3] = {"#d62728", "#1f77b4", "#2ca02c"};
  for (int i = 0; i < 3; ++i) {
    double y = mt + 16 + 20 * i;
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n  <text x=\"%.1f\" y=\"%.1f\" font-size=\"13\">%s</text>\n",
                  ml + 12, y, ml + 44, y, colors[i], ml + 50, y + 4, names[i]);
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace otcap
