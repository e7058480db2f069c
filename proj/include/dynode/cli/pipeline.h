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

// Pipeline stages behind the command-line tool. Every stage fans its jobs
// out over worker threads; each job owns its generator, tape and files, so
// outputs are identical for any thread count.
//
// Layout under config.out:
//   data/<env>/n<samples>_s<seed>/        datasets
//   models/<env>/<model>_n<samples>_s<seed>.{bin,json,loss.csv}
//   report/                               table1, cells, cumulative, figures
//   fig5/                                 phase-space study
//   rl/<env>/<variant>_s<seed>.{csv,agent} learning curves and checkpoints

#ifndef DYNODE_CLI_PIPELINE_H_
#define DYNODE_CLI_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dynode/cli/config.h"
#include "dynode/eval/report.h"
#include "dynode/rl/agent.h"

namespace dynode::cli {

using Paths = std::vector<std::filesystem::path>;

std::filesystem::path DatasetDir(const ExperimentConfig& config,
                                 const std::string& env, std::size_t samples,
                                 std::uint64_t seed);
std::filesystem::path ModelPrefix(const ExperimentConfig& config,
                                  const std::string& env,
                                  const std::string& model,
                                  std::size_t samples, std::uint64_t seed);
std::filesystem::path ReportDir(const ExperimentConfig& config);
std::filesystem::path Fig5Dir(const ExperimentConfig& config);
std::filesystem::path RlRunPrefix(const ExperimentConfig& config,
                                  const std::string& env,
                                  const std::string& variant,
                                  std::uint64_t seed);

// Writes <dir>/config.resolved.ini.
std::filesystem::path WriteResolvedConfig(const ExperimentConfig& config,
                                          const std::filesystem::path& dir);

// Random-action datasets for every (env, samples, seed).
Paths CmdCollect(const ExperimentConfig& config, std::ostream& log);

// Trains every (env, model, samples, seed) on its stored dataset and writes
// the checkpoint plus a loss CSV. A missing dataset is an IoError that names
// the collect command.
Paths CmdTrainModel(const ExperimentConfig& config, std::ostream& log);

// Scores every stored checkpoint on the evaluation protocol. A model that
// diverges on the evaluation set scores +inf instead of aborting the grid.
std::vector<eval::Cell> EvaluateModels(const ExperimentConfig& config,
                                       std::ostream& log);
// EvaluateModels plus table1.csv, cells.csv, cumulative.csv and figures.
Paths CmdEval(const ExperimentConfig& config, std::ostream& log);

struct Fig5Row {
  std::uint64_t seed = 0;
  std::string model;
  double final_state_error = 0.0;  // +inf if the reconstruction diverged
};

struct Fig5Result {
  std::vector<Fig5Row> rows;          // seed-major, config.fig5_models order
  eval::PhaseFigure figure;           // first seed
};

// MountainCar phase-space study: per seed, one random rollout of
// fig5_samples steps trains each fig5 model, which then reconstructs the
// energy-pumping trajectory from (-0.5, 0) open loop.
Fig5Result RunFig5(const ExperimentConfig& config, std::ostream& log);
std::string Fig5ErrorsCsv(const std::vector<Fig5Row>& rows);
// RunFig5 plus fig5.svg, fig5.csv and fig5_errors.csv.
Paths CmdFig5(const ExperimentConfig& config, std::ostream& log);

struct RlRun {
  std::string env;
  std::string variant;
  std::uint64_t seed = 0;
  rl::LearningCurve curve;
};

// Every (rl env, variant, seed). With `resume`, a run whose checkpoint
// exists continues from it; the stored configuration must match.
std::vector<RlRun> RunRl(const ExperimentConfig& config, bool resume,
                         std::ostream& log);
// RunRl plus one learning-curve CSV per run and fig3_<env>.svg.
Paths CmdRl(const ExperimentConfig& config, bool resume, std::ostream& log);

// Desk-scale reproductions: table1 (collect, train and evaluate over the
// four environments and three budgets; also emits the fig2 and fig4
// figures), fig4 (the same at 1000 samples only), fig5, fig3 and all.
// Throws ConfigError for an unknown target.
Paths CmdRepro(const ExperimentConfig& config, const std::string& target,
               std::ostream& log);

// Configuration used by `repro <target>` before it runs.
ExperimentConfig ReproConfig(const ExperimentConfig& config,
                             const std::string& target);

}  // namespace dynode::cli

#endif  // DYNODE_CLI_PIPELINE_H_
