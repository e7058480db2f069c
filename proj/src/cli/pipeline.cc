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

#include "dynode/cli/pipeline.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "dynode/common/errors.h"
#include "dynode/common/parallel.h"
#include "dynode/data/collect.h"
#include "dynode/data/dataset_io.h"
#include "dynode/data/normalizer.h"
#include "dynode/envs/environment.h"
#include "dynode/eval/metrics.h"
#include "dynode/eval/phase_space.h"
#include "dynode/models/train.h"

namespace dynode::cli {
namespace {

namespace fs = std::filesystem;

// Serializes whole lines from concurrent jobs.
class SyncLog {
 public:
  explicit SyncLog(std::ostream& out) : out_(out) {}
  void Line(const std::string& line) {
    std::lock_guard<std::mutex> lock(mutex_);
    out_ << line << '\n' << std::flush;
  }

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

std::size_t Workers(const ExperimentConfig& config) {
  return config.threads > 0 ? config.threads : ThreadBudget();
}

fs::path WithSuffix(const fs::path& prefix, const std::string& suffix) {
  return fs::path(prefix.string() + suffix);
}

struct ModelJob {
  std::string env;
  std::string model;
  std::size_t samples;
  std::uint64_t seed;
};

std::vector<ModelJob> ModelJobs(const ExperimentConfig& config,
                                const std::string& env) {
  std::vector<ModelJob> jobs;
  for (const std::string& model : config.models) {
    for (std::size_t n : config.samples) {
      for (std::uint64_t seed : config.seeds) {
        jobs.push_back({env, model, n, seed});
      }
    }
  }
  return jobs;
}

// Fresh model with the normalizer of its training data, trained in place.
models::DynamicsModel TrainOn(const ExperimentConfig& config,
                              const envs::Environment& env,
                              models::ModelKind kind,
                              const data::ReplayBuffer& buffer,
                              std::uint64_t seed,
                              models::TrainResult* result) {
  std::mt19937_64 init(seed);
  models::DynamicsModel model(ModelConfigFor(config, kind, env.spec().dt),
                              env.spec().state_dim, env.spec().action_dim,
                              init);
  model.set_normalizer(data::Normalizer::Fit(buffer.AllStates()));
  *result =
      models::TrainModel(model, buffer, TrainConfigFor(config, kind, seed));
  return model;
}

std::string LossCsv(const models::TrainResult& result) {
  std::map<std::size_t, double> probe;
  for (const models::ProbePoint& p : result.probe) probe[p.iteration] = p.loss;
  std::string out = "iteration,batch_loss,probe_loss\n";
  for (std::size_t i = 0; i < result.batch_losses.size(); ++i) {
    const auto it = probe.find(i);
    out += fmt::format("{},{},{}\n", i, result.batch_losses[i],
                       it == probe.end() ? "" : fmt::format("{}", it->second));
  }
  return out;
}

void WarnIgnoredHorizon(const ExperimentConfig& config, SyncLog& log) {
  if (std::find(config.models.begin(), config.models.end(), "nn") !=
      config.models.end()) {
    log.Line("warning: nn trains on one-step pairs; horizon settings are "
             "ignored for it");
  }
}

}  // namespace

fs::path DatasetDir(const ExperimentConfig& config, const std::string& env,
                    std::size_t samples, std::uint64_t seed) {
  return fs::path(config.out) / "data" / env /
         fmt::format("n{}_s{}", samples, seed);
}

fs::path ModelPrefix(const ExperimentConfig& config, const std::string& env,
                     const std::string& model, std::size_t samples,
                     std::uint64_t seed) {
  return fs::path(config.out) / "models" / env /
         fmt::format("{}_n{}_s{}", model, samples, seed);
}

fs::path ReportDir(const ExperimentConfig& config) {
  return fs::path(config.out) / "report";
}

fs::path Fig5Dir(const ExperimentConfig& config) {
  return fs::path(config.out) / "fig5";
}

fs::path RlRunPrefix(const ExperimentConfig& config, const std::string& env,
                     const std::string& variant, std::uint64_t seed) {
  return fs::path(config.out) / "rl" / env / fmt::format("{}_s{}", variant, seed);
}

fs::path WriteResolvedConfig(const ExperimentConfig& config,
                             const fs::path& dir) {
  const fs::path path = dir / "config.resolved.ini";
  eval::WriteTextFile(path, ResolvedConfigText(config));
  return path;
}

Paths CmdCollect(const ExperimentConfig& config, std::ostream& out) {
  config.Validate();
  SyncLog log(out);
  struct Job {
    std::string env;
    std::size_t samples;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& env : config.envs) {
    for (std::size_t n : config.samples) {
      for (std::uint64_t seed : config.seeds) jobs.push_back({env, n, seed});
    }
  }
  Paths dirs(jobs.size());
  ParallelFor(jobs.size(), Workers(config), [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto env = envs::MakeEnvironment(job.env);
    const data::ReplayBuffer buffer = data::CollectRandom(
        *env, job.samples, config.episode_length, job.seed);
    dirs[i] = DatasetDir(config, job.env, job.samples, job.seed);
    data::SaveDataset(dirs[i], buffer,
                      {job.env, job.seed, config.episode_length});
    log.Line(fmt::format("collected {} samples of {} (seed {}) -> {}",
                         job.samples, job.env, job.seed, dirs[i].string()));
  });
  dirs.push_back(WriteResolvedConfig(config, fs::path(config.out) / "data"));
  return dirs;
}

Paths CmdTrainModel(const ExperimentConfig& config, std::ostream& out) {
  config.Validate();
  SyncLog log(out);
  WarnIgnoredHorizon(config, log);
  std::vector<ModelJob> jobs;
  for (const std::string& env : config.envs) {
    const std::vector<ModelJob> more = ModelJobs(config, env);
    jobs.insert(jobs.end(), more.begin(), more.end());
  }
  Paths written(jobs.size());
  ParallelFor(jobs.size(), Workers(config), [&](std::size_t i) {
    const ModelJob& job = jobs[i];
    const fs::path dir = DatasetDir(config, job.env, job.samples, job.seed);
    if (!fs::exists(dir / "manifest.json")) {
      throw IoError("no dataset at " + dir.string() +
                    "; run `dynode collect` with the same config first");
    }
    const auto env = envs::MakeEnvironment(job.env);
    const data::ReplayBuffer buffer = data::LoadDataset(dir);
    const models::ModelKind kind = models::ParseModelKind(job.model);
    models::TrainResult result;
    const models::DynamicsModel model =
        TrainOn(config, *env, kind, buffer, job.seed, &result);
    const fs::path prefix =
        ModelPrefix(config, job.env, job.model, job.samples, job.seed);
    std::error_code ec;
    fs::create_directories(prefix.parent_path(), ec);
    models::SaveModel(prefix, model, HorizonFor(config, kind));
    eval::WriteTextFile(WithSuffix(prefix, ".loss.csv"), LossCsv(result));
    written[i] = prefix;
    log.Line(fmt::format("trained {} on {} n={} seed={} (final probe loss {})",
                         job.model, job.env, job.samples, job.seed,
                         result.probe.empty() ? 0.0 : result.probe.back().loss));
  });
  written.push_back(
      WriteResolvedConfig(config, fs::path(config.out) / "models"));
  return written;
}

std::vector<eval::Cell> EvaluateModels(const ExperimentConfig& config,
                                       std::ostream& out) {
  config.Validate();
  SyncLog log(out);
  std::vector<eval::Cell> cells;
  for (const std::string& env_name : config.envs) {
    const auto env = envs::MakeEnvironment(env_name);
    const eval::EvalSet set =
        eval::MakeEvalSet(*env, config.eval_seed, config.eval_rollouts,
                          config.eval_horizon);
    const std::vector<ModelJob> jobs = ModelJobs(config, env_name);
    std::vector<eval::Cell> env_cells(jobs.size());
    ParallelFor(jobs.size(), Workers(config), [&](std::size_t i) {
      const ModelJob& job = jobs[i];
      const fs::path prefix =
          ModelPrefix(config, job.env, job.model, job.samples, job.seed);
      if (!fs::exists(WithSuffix(prefix, ".json"))) {
        throw IoError("no checkpoint at " + prefix.string() +
                      ".json; run `dynode train-model` with the same config "
                      "first");
      }
      const models::DynamicsModel model = models::LoadModel(prefix);
      eval::Cell cell{job.env, job.model, job.samples, job.seed, 0.0, {}};
      try {
        const std::vector<double> errors =
            eval::StepErrors(eval::ModelPredictor(model), set);
        cell.mpe = eval::MeanOf(errors);
        cell.cumulative = eval::CumulativeCurve(errors);
      } catch (const NumericError& e) {
        cell.mpe = std::numeric_limits<double>::infinity();
        log.Line(fmt::format("warning: {} diverged on the evaluation set: {}",
                             prefix.string(), e.what()));
      }
      env_cells[i] = std::move(cell);
    });
    cells.insert(cells.end(), env_cells.begin(), env_cells.end());
  }
  return cells;
}

Paths CmdEval(const ExperimentConfig& config, std::ostream& out) {
  eval::MetricReport report;
  report.cells = EvaluateModels(config, out);
  Paths paths = eval::EmitReport(report, ReportDir(config));
  paths.push_back(WriteResolvedConfig(config, ReportDir(config)));
  return paths;
}

Fig5Result RunFig5(const ExperimentConfig& config, std::ostream& out) {
  config.Validate();
  SyncLog log(out);
  const auto env = envs::MakeEnvironment("mountaincar");
  const data::Vec start = {-0.5, 0.0};
  const data::Rollout scripted =
      eval::EnergyPumpingRollout(*env, start, config.fig5_max_steps);
  const eval::PhaseTrajectory truth = eval::TruthTrajectory(scripted);

  struct Job {
    std::uint64_t seed;
    std::string model;
  };
  std::vector<Job> jobs;
  for (std::uint64_t seed : config.seeds) {
    for (const std::string& model : config.fig5_models) {
      jobs.push_back({seed, model});
    }
  }
  std::vector<Fig5Row> rows(jobs.size());
  std::vector<std::optional<eval::PhaseTrajectory>> paths(jobs.size());
  ParallelFor(jobs.size(), Workers(config), [&](std::size_t i) {
    const Job& job = jobs[i];
    // One long random rollout: the episode length equals the budget.
    const data::ReplayBuffer buffer = data::CollectRandom(
        *env, config.fig5_samples, config.fig5_samples, job.seed);
    const models::ModelKind kind = models::ParseModelKind(job.model);
    models::TrainResult result;
    const models::DynamicsModel model =
        TrainOn(config, *env, kind, buffer, job.seed, &result);
    rows[i] = {job.seed, job.model, std::numeric_limits<double>::infinity()};
    try {
      eval::PhaseTrajectory path = eval::ReconstructTrajectory(
          eval::ModelPredictor(model), scripted, job.model);
      rows[i].final_state_error =
          eval::FinalStateError(path, truth, model.normalizer());
      paths[i] = std::move(path);
    } catch (const NumericError& e) {
      log.Line(fmt::format("warning: {} (seed {}) diverged: {}", job.model,
                           job.seed, e.what()));
    }
    log.Line(fmt::format("fig5 {} seed {}: final-state error {}", job.model,
                         job.seed, rows[i].final_state_error));
  });

  Fig5Result result;
  result.rows = rows;
  result.figure.title = "MountainCar phase space (energy pumping)";
  result.figure.trajectories.push_back(truth);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].seed == config.seeds.front() && paths[i]) {
      result.figure.trajectories.push_back(*paths[i]);
    }
  }
  result.figure.training_states =
      data::CollectRandom(*env, config.fig5_samples, config.fig5_samples,
                          config.seeds.front())
          .AllStates();
  return result;
}

std::string Fig5ErrorsCsv(const std::vector<Fig5Row>& rows) {
  std::string out = "seed,model,final_state_error\n";
  for (const Fig5Row& r : rows) {
    out += fmt::format("{},{},{}\n", r.seed, r.model, r.final_state_error);
  }
  return out;
}

Paths CmdFig5(const ExperimentConfig& config, std::ostream& out) {
  const Fig5Result result = RunFig5(config, out);
  const fs::path dir = Fig5Dir(config);
  const Paths paths = {dir / "fig5.svg", dir / "fig5.csv",
                       dir / "fig5_errors.csv",
                       dir / "config.resolved.ini"};
  eval::WriteTextFile(paths[0],
                      eval::PhaseSvg(result.figure.trajectories,
                                     result.figure.training_states,
                                     result.figure.title));
  eval::WriteTextFile(paths[1], eval::PhaseCsv(result.figure.trajectories));
  eval::WriteTextFile(paths[2], Fig5ErrorsCsv(result.rows));
  WriteResolvedConfig(config, dir);
  return paths;
}

std::vector<RlRun> RunRl(const ExperimentConfig& config, bool resume,
                         std::ostream& out) {
  config.Validate();
  SyncLog log(out);
  std::vector<RlRun> runs;
  for (const std::string& env : config.rl_envs) {
    for (const std::string& variant : config.rl_variants) {
      for (std::uint64_t seed : config.seeds) {
        runs.push_back({env, variant, seed, {}});
      }
    }
  }
  ParallelFor(runs.size(), Workers(config), [&](std::size_t i) {
    RlRun& run = runs[i];
    const auto env = envs::MakeEnvironment(run.env);
    const rl::Variant variant = rl::ParseVariant(run.variant);
    const rl::SacConfig sac = SacConfigFor(config, run.seed);
    const fs::path prefix = RlRunPrefix(config, run.env, run.variant, run.seed);
    const fs::path checkpoint = WithSuffix(prefix, ".agent");
    std::optional<rl::Agent> agent;
    if (resume && fs::exists(checkpoint)) {
      agent.emplace(rl::Agent::Load(*env, checkpoint));
      if (agent->variant() != variant || !(agent->config() == sac)) {
        throw ConfigError("checkpoint " + checkpoint.string() +
                          " was written with a different configuration");
      }
      log.Line(fmt::format("resuming {} at step {}", checkpoint.string(),
                           agent->env_step()));
    } else {
      agent.emplace(*env, variant, sac);
    }
    const std::size_t chunk = config.checkpoint_every > 0
                                  ? config.checkpoint_every
                                  : std::numeric_limits<std::size_t>::max();
    try {
      while (!agent->finished()) {
        agent->Run(chunk);
        agent->Save(checkpoint);
      }
    } catch (const NumericError&) {
      agent->Save(WithSuffix(prefix, ".failed.agent"));
      throw;
    }
    if (!fs::exists(checkpoint)) agent->Save(checkpoint);
    run.curve = agent->curve();
    eval::WriteTextFile(WithSuffix(prefix, ".csv"),
                        rl::LearningCurveCsv(run.curve));
    log.Line(fmt::format("{} {} seed {}: final return {}", run.env,
                         run.variant, run.seed, rl::FinalReturn(run.curve)));
  });
  return runs;
}

Paths CmdRl(const ExperimentConfig& config, bool resume, std::ostream& out) {
  const std::vector<RlRun> runs = RunRl(config, resume, out);
  Paths paths;
  std::map<std::string, std::map<std::string, std::vector<rl::LearningCurve>>>
      by_env;
  for (const RlRun& run : runs) {
    paths.push_back(
        WithSuffix(RlRunPrefix(config, run.env, run.variant, run.seed), ".csv"));
    by_env[run.env][run.variant].push_back(run.curve);
  }
  for (const auto& [env, curves] : by_env) {
    const fs::path svg = fs::path(config.out) / "rl" / ("fig3_" + env + ".svg");
    eval::WriteTextFile(svg, rl::Fig3Svg(env, curves));
    paths.push_back(svg);
  }
  paths.push_back(WriteResolvedConfig(config, fs::path(config.out) / "rl"));
  return paths;
}

ExperimentConfig ReproConfig(const ExperimentConfig& config,
                             const std::string& target) {
  ExperimentConfig c = config;
  if (target == "table1" || target == "all") {
    c.envs = envs::EnvironmentNames();
    c.models = {"nn", "dynode-euler", "dynode-rk4"};
    c.samples = {200, 500, 1000};
  } else if (target == "fig4") {
    c.envs = envs::EnvironmentNames();
    c.models = {"nn", "dynode-euler", "dynode-rk4"};
    c.samples = {1000};
  } else if (target == "fig3") {
    c.rl_envs = {"pendulum", "cartpole-swingup"};
    c.rl_variants = {"sac", "mve-sac", "dynode-sac"};
  } else if (target != "fig5") {
    throw ConfigError("unknown repro target '" + target +
                      "' (expected all, table1, fig4, fig5 or fig3)");
  }
  c.Validate();
  return c;
}

Paths CmdRepro(const ExperimentConfig& config, const std::string& target,
               std::ostream& out) {
  const ExperimentConfig c = ReproConfig(config, target);
  Paths paths;
  auto append = [&paths](const Paths& more) {
    paths.insert(paths.end(), more.begin(), more.end());
  };
  if (target == "table1" || target == "fig4" || target == "all") {
    append(CmdCollect(c, out));
    append(CmdTrainModel(c, out));
    append(CmdEval(c, out));
  }
  if (target == "fig5" || target == "all") append(CmdFig5(c, out));
  if (target == "fig3" || target == "all") append(CmdRl(c, false, out));
  return paths;
}

}  // namespace dynode::cli
