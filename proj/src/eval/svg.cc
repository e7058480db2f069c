// Copyright 2026 The DyNODE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dynode/eval/svg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace dynode::eval {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Empty or degenerate ranges get a unit-sized window; others 5% padding.
  void Finish() {
    if (lo > hi) {
      lo = 0;
      hi = 1;
    } else if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      const double pad = std::max(0.5, std::abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
double NiceStep(double span) {
  const double raw = span / 5;
  const double base = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * base >= raw) return m * base;
  }
  return 10 * base;
}

std::string Num(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

Heatmap Histogram2d(std::span<const double> x, std::span<const double> y,
                    double x_min, double x_max, double y_min, double y_max,
                    std::size_t nx, std::size_t ny) {
  if (x.size() != y.size() || nx == 0 || ny == 0 || !(x_max > x_min) ||
      !(y_max > y_min)) {
    throw std::invalid_argument("bad histogram arguments");
  }
  Heatmap map{x_min, x_max, y_min, y_max, nx, ny,
              std::vector<double>(nx * ny, 0.0)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fx = (x[i] - x_min) / (x_max - x_min);
    const double fy = (y[i] - y_min) / (y_max - y_min);
    if (!(fx >= 0 && fx <= 1 && fy >= 0 && fy <= 1)) continue;
    const auto ix = std::min(nx - 1, static_cast<std::size_t>(fx * nx));
    const auto iy = std::min(ny - 1, static_cast<std::size_t>(fy * ny));
    map.counts[iy * nx + ix] += 1;
  }
  return map;
}

std::string RenderLinePlot(const PlotSpec& spec, std::span<const Series> series,
                           const Heatmap* background) {
  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;

  Range xr, yr;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.Add(s.x[i]);
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0;
      yr.Add(s.y[i] - e);
      yr.Add(s.y[i] + e);
    }
  }
  if (background != nullptr) {
    xr.Add(background->x_min);
    xr.Add(background->x_max);
    yr.Add(background->y_min);
    yr.Add(background->y_max);
  }
  xr.Finish();
  yr.Finish();
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      spec.width, spec.height, spec.width, spec.height);
  out += fmt::format(
      "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      spec.width, spec.height);

  if (background != nullptr && !background->counts.empty()) {
    const double peak =
        *std::max_element(background->counts.begin(), background->counts.end());
    const double cw = (background->x_max - background->x_min) / background->nx;
    const double ch = (background->y_max - background->y_min) / background->ny;
    out += "<g fill=\"#6baed6\">\n";
    for (std::size_t iy = 0; iy < background->ny; ++iy) {
      for (std::size_t ix = 0; ix < background->nx; ++ix) {
        const double c = background->counts[iy * background->nx + ix];
        if (c <= 0 || peak <= 0) continue;
        const double x0 = background->x_min + ix * cw;
        const double y1 = background->y_min + (iy + 1) * ch;
        out += fmt::format(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
            "fill-opacity=\"{:.3f}\"/>\n",
            Num(px(x0)), Num(py(y1)), Num(px(x0 + cw) - px(x0)),
            Num(py(y1 - ch) - py(y1)), 0.15 + 0.75 * c / peak);
      }
    }
    out += "</g>\n";
  }

  // Axes, ticks and grid.
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      Num(left), Num(top), Num(pw), Num(ph));
  const double xs = NiceStep(xr.hi - xr.lo);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi; t += xs) {
    const double v = std::abs(t) < xs * 1e-9 ? 0.0 : t;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\"/>"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4:.6g}</text>\n",
        Num(px(v)), Num(top), Num(top + ph), Num(top + ph + 16), v);
  }
  const double ys = NiceStep(yr.hi - yr.lo);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi; t += ys) {
    const double v = std::abs(t) < ys * 1e-9 ? 0.0 : t;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#ddd\"/>"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5:.6g}</text>\n",
        Num(left), Num(py(v)), Num(left + pw), Num(left - 6), Num(py(v) + 4),
        v);
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}"
      "</text>\n",
      Num(left + pw / 2), Num(top - 14), Escape(spec.title));
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
      Num(left + pw / 2), Num(spec.height - 14), Escape(spec.x_label));
  out += fmt::format(
      "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      Num(top + ph / 2), Escape(spec.y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out += fmt::format(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" "
            "points=\"{}\"/>\n",
            color, points);
      }
      points.clear();
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += Num(px(s.x[i])) + "," + Num(py(s.y[i]));
    }
    flush();
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (i < s.err.size() && std::isfinite(s.err[i]) && s.err[i] > 0) {
        out += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"/>\n",
            Num(px(s.x[i])), Num(py(s.y[i] - s.err[i])),
            Num(py(s.y[i] + s.err[i])), color);
      }
      if (s.markers) {
        out += fmt::format(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
            Num(px(s.x[i])), Num(py(s.y[i])), color);
      }
    }
    const double ly = top + 10 + 18 * k;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/><text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        Num(left + pw + 10), Num(ly), Num(left + pw + 30), color,
        Num(left + pw + 35), Num(ly + 4), Escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dynode::eval
