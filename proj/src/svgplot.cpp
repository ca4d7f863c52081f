#include "lab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lab/errors.hpp"

namespace lab::harness {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
constexpr int kPaletteSize = 6;

std::string esc(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '&') {
      out += "&amp;";
    } else if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else {
      out += c;
    }
  }
  return out;
}

std::string num(double v, const char* f = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void take(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (lo > hi) {  // no finite data at all
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 1.0;
      hi += 1.0;
    }
  }
  double span() const { return hi - lo; }
};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           int width, int height) {
  if (series.empty()) throw ConfigError("line_chart_svg: no series");
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw ConfigError("line_chart_svg: series '" + s.label + "' has ragged x/y");
    }
  }

  Range rx, ry;
  for (const auto& s : series) {
    for (const double v : s.x) rx.take(v);
    for (const double v : s.y) ry.take(v);
  }
  rx.finish();
  ry.finish();
  // A little vertical headroom keeps extrema off the frame.
  const double pad = 0.05 * ry.span();
  ry.lo -= pad;
  ry.hi += pad;

  const double ml = 72, mr = 18, mt = 42, mb = 52;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - rx.lo) / rx.span() * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / ry.span() * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" " +
         "font-family=\"sans-serif\" font-size=\"16\">" + esc(title) + "</text>\n";

  // frame
  svg += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" +
         num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";

  // ticks and grid
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = rx.lo + rx.span() * i / nticks;
    const double gx = px(fx);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(gx) + "\" y2=\"" +
           num(mt + ph) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(fx, "%.4g") +
           "</text>\n";
    const double fy = ry.lo + ry.span() * i / nticks;
    const double gy = py(fy);
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(ml + pw) + "\" y2=\"" +
           num(gy) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(fy, "%.4g") +
           "</text>\n";
  }
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(height - 12.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + esc(x_label) +
         "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " +
         num(mt + ph / 2) + ")\">" + esc(y_label) + "</text>\n";

  // polylines (split at non-finite samples)
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
        pts.clear();
      }
    };
    for (std::size_t i = 0; i < series[si].x.size(); ++i) {
      const double vx = series[si].x[i];
      const double vy = series[si].y[i];
      if (!std::isfinite(vx) || !std::isfinite(vy)) {
        flush();
        continue;
      }
      pts += num(px(vx), "%.2f");
      pts += ",";
      pts += num(py(vy), "%.2f");
      pts += " ";
    }
    flush();
  }

  // legend
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double ly = mt + 14 + 16 * static_cast<double>(si);
    svg += "<line x1=\"" + num(ml + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(ml + 34) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + kPalette[si % kPaletteSize] +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(ml + 40) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + esc(series[si].label) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

std::string series_to_csv(const std::vector<Series>& series) {
  std::string out = "series,x,y\n";
  for (const auto& s : series) {
    std::string label = s.label;
    for (char& c : label) {
      if (c == ',') c = ';';
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out += label + "," + num(s.x[i], "%.17g") + "," + num(s.y[i], "%.17g") + "\n";
    }
  }
  return out;
}

}  // namespace lab::harness
