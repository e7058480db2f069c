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

#include "dynode/eval/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "dynode/common/errors.h"
#include "dynode/eval/svg.h"

namespace dynode::eval {
namespace {

constexpr const char* kTable1Note =
    "# mpe_std is the population standard deviation over seeds "
    "(divisor n_seeds); MPE is in normalized state units\n";
constexpr const char* kTable1Header =
    "env,model,samples,mpe_mean,mpe_std,n_seeds";
constexpr const char* kCellsHeader = "env,model,samples,seed,mpe";

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Data lines of a CSV after checking the header; skips '#' comments.
std::vector<std::vector<std::string>> DataRows(const std::string& text,
                                               const std::string& header,
                                               const std::string& what) {
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  std::vector<std::vector<std::string>> rows;
  const std::size_t width = SplitFields(header).size();
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != header) {
        throw IoError(what + ": unexpected header '" + line + "'");
      }
      seen_header = true;
      continue;
    }
    auto fields = SplitFields(line);
    if (fields.size() != width) {
      throw IoError(what + " line " + std::to_string(line_no) + ": expected " +
                    std::to_string(width) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw IoError(what + ": missing header");
  return rows;
}

template <typename T>
T ParseNumber(const std::string& field, const std::string& what) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(what + ": bad number '" + field + "'");
  }
  return value;
}

// Mean curve over the cells of one model, truncated to the shortest curve.
std::vector<double> MeanCurve(const std::vector<const Cell*>& cells) {
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const Cell* c : cells) len = std::min(len, c->cumulative.size());
  std::vector<double> mean(len, 0.0);
  for (const Cell* c : cells) {
    for (std::size_t h = 0; h < len; ++h) mean[h] += c->cumulative[h];
  }
  for (double& v : mean) v /= static_cast<double>(cells.size());
  return mean;
}

}  // namespace

std::vector<SummaryRow> Summarize(std::span<const Cell> cells) {
  std::map<std::tuple<std::string, std::string, std::size_t>,
           std::vector<double>>
      groups;
  for (const Cell& c : cells) {
    groups[{c.env, c.model, c.samples}].push_back(c.mpe);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : groups) {
    SummaryRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), 0.0,
                   0.0, values.size()};
    const double n = static_cast<double>(values.size());
    bool finite = true;
    for (double v : values) {
      finite = finite && std::isfinite(v);
      row.mpe_mean += v;
    }
    if (!finite) {
      row.mpe_mean = row.mpe_std = std::numeric_limits<double>::infinity();
    } else {
      row.mpe_mean /= n;
      double ss = 0.0;
      for (double v : values) ss += (v - row.mpe_mean) * (v - row.mpe_mean);
      row.mpe_std = std::sqrt(ss / n);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string Table1Csv(std::span<const SummaryRow> rows) {
  std::string out = kTable1Note;
  out += kTable1Header;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.env, r.model, r.samples,
                       r.mpe_mean, r.mpe_std, r.n_seeds);
  }
  return out;
}

std::vector<SummaryRow> ParseTable1Csv(const std::string& text) {
  const std::string what = "table1.csv";
  std::vector<SummaryRow> rows;
  for (const auto& f : DataRows(text, kTable1Header, what)) {
    rows.push_back({f[0], f[1], ParseNumber<std::size_t>(f[2], what),
                    ParseNumber<double>(f[3], what),
                    ParseNumber<double>(f[4], what),
                    ParseNumber<std::size_t>(f[5], what)});
  }
  return rows;
}

std::string CellsCsv(std::span<const Cell> cells) {
  std::string out = kCellsHeader;
  out += '\n';
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{},{}\n", c.env, c.model, c.samples, c.seed,
                       c.mpe);
  }
  return out;
}

std::vector<Cell> ParseCellsCsv(const std::string& text) {
  const std::string what = "cells.csv";
  std::vector<Cell> cells;
  for (const auto& f : DataRows(text, kCellsHeader, what)) {
    cells.push_back({f[0], f[1], ParseNumber<std::size_t>(f[2], what),
                     ParseNumber<std::uint64_t>(f[3], what),
                     ParseNumber<double>(f[4], what),
                     {}});
  }
  return cells;
}

std::string CumulativeCsv(std::span<const Cell> cells) {
  std::string out = "env,model,samples,seed,horizon,cumulative_error\n";
  for (const auto& c : cells) {
    for (std::size_t h = 0; h < c.cumulative.size(); ++h) {
      out += fmt::format("{},{},{},{},{},{}\n", c.env, c.model, c.samples,
                         c.seed, h, c.cumulative[h]);
    }
  }
  return out;
}

std::string Fig2Svg(const std::string& env, std::span<const SummaryRow> rows) {
  std::vector<Series> series;
  for (const auto& r : rows) {
    if (r.env != env) continue;
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.label == r.model; });
    if (it == series.end()) {
      series.push_back({r.model, {}, {}, {}, true});
      it = std::prev(series.end());
    }
    it->x.push_back(static_cast<double>(r.samples));
    it->y.push_back(r.mpe_mean);
    it->err.push_back(r.mpe_std);
  }
  return RenderLinePlot(
      {env + ": mean prediction error", "training samples", "MPE (mean +- std)"},
      series);
}

std::string Fig4Svg(const std::string& env, std::span<const Cell> cells) {
  std::size_t budget = 0;
  for (const auto& c : cells) {
    if (c.env == env && !c.cumulative.empty()) budget = std::max(budget, c.samples);
  }
  std::vector<std::string> models;
  std::map<std::string, std::vector<const Cell*>> by_model;
  for (const auto& c : cells) {
    if (c.env != env || c.samples != budget || c.cumulative.empty()) continue;
    if (!by_model.count(c.model)) models.push_back(c.model);
    by_model[c.model].push_back(&c);
  }
  std::vector<Series> series;
  for (const auto& model : models) {
    Series s{model, {}, MeanCurve(by_model[model]), {}, false};
    for (std::size_t h = 0; h < s.y.size(); ++h) {
      s.x.push_back(static_cast<double>(h));
    }
    series.push_back(std::move(s));
  }
  return RenderLinePlot({fmt::format("{}: cumulative error ({} samples)", env,
                                     budget),
                         "horizon", "cumulative error"},
                        series);
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " +
                    path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::filesystem::path> EmitReport(
    const MetricReport& report, const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    WriteTextFile(out_dir / name, content);
    written.push_back(out_dir / name);
  };
  const std::vector<SummaryRow> rows = Summarize(report.cells);
  emit("table1.csv", Table1Csv(rows));
  emit("cells.csv", CellsCsv(report.cells));
  std::set<std::string> envs;
  bool any_curve = false;
  for (const auto& c : report.cells) {
    envs.insert(c.env);
    any_curve = any_curve || !c.cumulative.empty();
  }
  if (any_curve) emit("cumulative.csv", CumulativeCsv(report.cells));
  for (const auto& env : envs) {
    emit("fig2_" + env + ".svg", Fig2Svg(env, rows));
    const bool has_curve =
        std::any_of(report.cells.begin(), report.cells.end(), [&](const Cell& c) {
          return c.env == env && !c.cumulative.empty();
        });
    if (has_curve) emit("fig4_" + env + ".svg", Fig4Svg(env, report.cells));
  }
  if (report.phase) {
    emit("fig5.svg", PhaseSvg(report.phase->trajectories,
                              report.phase->training_states,
                              report.phase->title));
    emit("fig5.csv", PhaseCsv(report.phase->trajectories));
  }
  return written;
}

}  // namespace dynode::eval
