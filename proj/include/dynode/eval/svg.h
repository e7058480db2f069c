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

// Dependency-free SVG line plots with axes, error bars, a legend and an
// optional density background. Output is a pure function of the inputs.

#ifndef DYNODE_EVAL_SVG_H_
#define DYNODE_EVAL_SVG_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dynode::eval {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars, same length as y
  bool markers = true;
};

// Counts on a regular grid: counts[iy * nx + ix] covers cell (ix, iy).
struct Heatmap {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::size_t nx = 0, ny = 0;
  std::vector<double> counts;
};

// 2-D histogram of (x[i], y[i]) over the given extent; points outside are
// dropped.
Heatmap Histogram2d(std::span<const double> x, std::span<const double> y,
                    double x_min, double x_max, double y_min, double y_max,
                    std::size_t nx, std::size_t ny);

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 420;
};

// Non-finite points break a polyline and are left out of the axis range.
std::string RenderLinePlot(const PlotSpec& spec, std::span<const Series> series,
                           const Heatmap* background = nullptr);

}  // namespace dynode::eval

#endif  // DYNODE_EVAL_SVG_H_
