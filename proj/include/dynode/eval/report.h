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

// Aggregation of per-seed metrics and emission of the report files:
// table1.csv (mean and std per env/model/budget), cells.csv (one row per
// seed), cumulative.csv, fig2_<env>.svg, fig4_<env>.svg and fig5.svg.

#ifndef DYNODE_EVAL_REPORT_H_
#define DYNODE_EVAL_REPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynode/data/replay.h"
#include "dynode/eval/phase_space.h"

namespace dynode::eval {

// One trained model evaluated once.
struct Cell {
  std::string env;
  std::string model;
  std::size_t samples = 0;  // training transitions
  std::uint64_t seed = 0;
  double mpe = 0.0;
  std::vector<double> cumulative;  // c(0..H); may be empty

  bool operator==(const Cell&) const = default;
};

// Mean and population std (divisor n_seeds) over the seeds of one
// (env, model, samples) group.
struct SummaryRow {
  std::string env;
  std::string model;
  std::size_t samples = 0;
  double mpe_mean = 0.0;
  double mpe_std = 0.0;
  std::size_t n_seeds = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct PhaseFigure {
  std::string title;
  std::vector<PhaseTrajectory> trajectories;
  std::vector<data::Vec> training_states;
};

struct MetricReport {
  std::vector<Cell> cells;
  std::optional<PhaseFigure> phase;
};

// Groups sorted by (env, model, samples). A group containing a non-finite
// MPE (diverged model) reports mean and std as +inf.
std::vector<SummaryRow> Summarize(std::span<const Cell> cells);

std::string Table1Csv(std::span<const SummaryRow> rows);
std::vector<SummaryRow> ParseTable1Csv(const std::string& text);
std::string CellsCsv(std::span<const Cell> cells);
// Parses the cells table (cumulative curves are not part of it).
std::vector<Cell> ParseCellsCsv(const std::string& text);
// Long format: env, model, samples, seed, horizon, cumulative_error.
std::string CumulativeCsv(std::span<const Cell> cells);

// MPE mean +- std against training samples, one series per model.
std::string Fig2Svg(const std::string& env, std::span<const SummaryRow> rows);
// Seed-averaged cumulative error against horizon at the largest budget.
std::string Fig4Svg(const std::string& env, std::span<const Cell> cells);

// Writes the files above into out_dir (created if missing) and returns
// their paths in write order. Figures are emitted per environment present;
// fig5.svg and fig5.csv only if report.phase is set. Throws IoError.
std::vector<std::filesystem::path> EmitReport(
    const MetricReport& report, const std::filesystem::path& out_dir);

// Writes `content` verbatim, creating parent directories. Throws IoError.
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content);
// Throws IoError if the file cannot be read.
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace dynode::eval

#endif  // DYNODE_EVAL_REPORT_H_
