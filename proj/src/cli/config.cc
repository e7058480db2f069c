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

#include "dynode/cli/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dynode/common/errors.h"
#include "dynode/envs/environment.h"

namespace dynode::cli {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (item.empty()) throw std::invalid_argument("empty list item");
    items.push_back(item);
  }
  return items;
}

template <typename T>
T ParseScalar(const std::string& raw) {
  const std::string text = Trim(raw);
  if constexpr (std::is_same_v<T, std::string>) {
    if (text.empty()) throw std::invalid_argument("empty value");
    return text;
  } else {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
      throw std::invalid_argument("'" + text + "' is not a valid number");
    }
    return value;
  }
}

template <typename T>
struct Codec {
  static std::string Format(const T& v) { return fmt::format("{}", v); }
  static T Parse(const std::string& text) { return ParseScalar<T>(text); }
};

template <typename T>
struct Codec<std::vector<T>> {
  static std::string Format(const std::vector<T>& v) {
    return fmt::format("{}", fmt::join(v, ", "));
  }
  static std::vector<T> Parse(const std::string& text) {
    std::vector<T> out;
    for (const std::string& item : SplitList(text)) {
      out.push_back(ParseScalar<T>(item));
    }
    return out;
  }
};

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T, typename Access>
Field Bind(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const ExperimentConfig& c) {
            return Codec<T>::Format(access(const_cast<ExperimentConfig&>(c)));
          },
          [access](ExperimentConfig& c, const std::string& text) {
            access(c) = Codec<T>::Parse(text);
          }};
}

#define DYNODE_FIELD(section, key, member)                                \
  Bind<std::remove_reference_t<decltype(std::declval<ExperimentConfig&>() \
                                            .member)>>(                   \
      section, key, [](ExperimentConfig& c) -> auto& { return c.member; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      DYNODE_FIELD("experiment", "envs", envs),
      DYNODE_FIELD("experiment", "models", models),
      DYNODE_FIELD("experiment", "samples", samples),
      DYNODE_FIELD("experiment", "seeds", seeds),
      DYNODE_FIELD("experiment", "episode_length", episode_length),
      DYNODE_FIELD("experiment", "out", out),
      DYNODE_FIELD("experiment", "threads", threads),
      DYNODE_FIELD("model", "hidden", hidden),
      DYNODE_FIELD("model", "activation", activation),
      DYNODE_FIELD("model", "substeps", substeps),
      DYNODE_FIELD("train", "horizon_euler", horizon_euler),
      DYNODE_FIELD("train", "horizon_rk4", horizon_rk4),
      DYNODE_FIELD("train", "batch", batch),
      DYNODE_FIELD("train", "lr", lr),
      DYNODE_FIELD("train", "iterations", iterations),
      DYNODE_FIELD("train", "noise_sigma", noise_sigma),
      DYNODE_FIELD("train", "eval_every", eval_every),
      DYNODE_FIELD("train", "probe_batch", probe_batch),
      DYNODE_FIELD("eval", "rollouts", eval_rollouts),
      DYNODE_FIELD("eval", "horizon", eval_horizon),
      DYNODE_FIELD("eval", "seed", eval_seed),
      DYNODE_FIELD("fig5", "samples", fig5_samples),
      DYNODE_FIELD("fig5", "max_steps", fig5_max_steps),
      DYNODE_FIELD("fig5", "models", fig5_models),
      DYNODE_FIELD("rl", "envs", rl_envs),
      DYNODE_FIELD("rl", "variants", rl_variants),
      DYNODE_FIELD("rl", "steps", sac.steps),
      DYNODE_FIELD("rl", "gamma", sac.gamma),
      DYNODE_FIELD("rl", "alpha", sac.alpha),
      DYNODE_FIELD("rl", "tau", sac.tau),
      DYNODE_FIELD("rl", "lr", sac.lr),
      DYNODE_FIELD("rl", "batch", sac.batch),
      DYNODE_FIELD("rl", "hidden", sac.hidden),
      DYNODE_FIELD("rl", "start_steps", sac.start_steps),
      DYNODE_FIELD("rl", "update_after", sac.update_after),
      DYNODE_FIELD("rl", "updates_per_step", sac.updates_per_step),
      DYNODE_FIELD("rl", "replay_capacity", sac.replay_capacity),
      DYNODE_FIELD("rl", "mve_horizon", sac.mve_horizon),
      DYNODE_FIELD("rl", "divergence_bound", sac.divergence_bound),
      DYNODE_FIELD("rl", "retrain_every", sac.retrain_every),
      DYNODE_FIELD("rl", "model_iterations", sac.model_iterations),
      DYNODE_FIELD("rl", "model_horizon", sac.model_horizon),
      DYNODE_FIELD("rl", "model_batch", sac.model_batch),
      DYNODE_FIELD("rl", "model_lr", sac.model_lr),
      DYNODE_FIELD("rl", "model_hidden", sac.model_hidden),
      DYNODE_FIELD("rl", "model_noise_sigma", sac.model_noise_sigma),
      DYNODE_FIELD("rl", "checkpoint_every", checkpoint_every),
  };
  return fields;
}

#undef DYNODE_FIELD

const Field* FindField(const std::string& section, const std::string& key) {
  for (const Field& f : Fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

void SetField(ExperimentConfig& config, const std::string& section,
              const std::string& key, const std::string& value) {
  const Field* field = FindField(section, key);
  if (field == nullptr) {
    throw ConfigError("unknown config key '" + section + "." + key + "'");
  }
  try {
    field->set(config, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for '" + section + "." + key +
                      "': " + e.what());
  }
}

void RequireKnown(const std::vector<std::string>& names,
                  const std::vector<std::string>& allowed,
                  const std::string& key) {
  for (const std::string& n : names) {
    if (std::find(allowed.begin(), allowed.end(), n) == allowed.end()) {
      throw ConfigError("'" + key + "': unknown name '" + n + "' (expected " +
                        fmt::format("{}", fmt::join(allowed, ", ")) + ")");
    }
  }
}

void RequirePositive(double value, const std::string& key) {
  if (!(value > 0)) throw ConfigError("'" + key + "' must be positive");
}

}  // namespace

void ExperimentConfig::Validate() const {
  const std::vector<std::string> env_names = envs::EnvironmentNames();
  const std::vector<std::string> model_names = {"nn", "dynode-euler",
                                                "dynode-rk4"};
  RequireKnown(envs, env_names, "experiment.envs");
  RequireKnown(rl_envs, env_names, "rl.envs");
  RequireKnown(models, model_names, "experiment.models");
  RequireKnown(fig5_models, model_names, "fig5.models");
  RequireKnown(rl_variants, {"sac", "mve-sac", "dynode-sac"}, "rl.variants");
  RequireKnown({activation}, {"tanh", "relu"}, "model.activation");
  for (std::size_t n : samples) RequirePositive(n, "experiment.samples");
  if (envs.empty() || models.empty() || samples.empty() || seeds.empty()) {
    throw ConfigError("experiment.envs, models, samples and seeds need items");
  }
  if (out.empty()) throw ConfigError("'experiment.out' must not be empty");
  RequirePositive(episode_length, "experiment.episode_length");
  if (hidden.empty()) throw ConfigError("'model.hidden' needs a layer");
  for (std::size_t w : hidden) RequirePositive(w, "model.hidden");
  RequirePositive(substeps, "model.substeps");
  RequirePositive(horizon_euler, "train.horizon_euler");
  RequirePositive(horizon_rk4, "train.horizon_rk4");
  RequirePositive(batch, "train.batch");
  RequirePositive(lr, "train.lr");
  RequirePositive(eval_every, "train.eval_every");
  RequirePositive(probe_batch, "train.probe_batch");
  if (!(noise_sigma >= 0)) throw ConfigError("'train.noise_sigma' must be >= 0");
  RequirePositive(eval_rollouts, "eval.rollouts");
  RequirePositive(eval_horizon, "eval.horizon");
  RequirePositive(fig5_samples, "fig5.samples");
  RequirePositive(fig5_max_steps, "fig5.max_steps");
  try {
    sac.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[rl] ") + e.what());
  }
}

ExperimentConfig ParseConfig(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' is outside a section");
    }
    const bool known = std::any_of(Fields().begin(), Fields().end(),
                                   [&](const Field& f) {
                                     return f.section == section;
                                   });
    if (!known) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      SetField(config, section, key, value.data());
    }
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string ResolvedConfigText(const ExperimentConfig& config) {
  std::string text;
  std::string section;
  for (const Field& f : Fields()) {
    if (f.section != section) {
      text += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    text += f.key + " = " + f.get(config) + "\n";
  }
  return text;
}

void ApplyOverride(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string name = Trim(assignment.substr(0, eq));
  const auto dot = name.find('.');
  if (eq == std::string::npos || dot == std::string::npos) {
    throw ConfigError("override '" + assignment +
                      "' must look like section.key=value");
  }
  SetField(config, name.substr(0, dot), name.substr(dot + 1),
           assignment.substr(eq + 1));
  config.Validate();
}

std::size_t HorizonFor(const ExperimentConfig& config, models::ModelKind kind) {
  switch (kind) {
    case models::ModelKind::kDynodeEuler: return config.horizon_euler;
    case models::ModelKind::kDynodeRk4: return config.horizon_rk4;
    case models::ModelKind::kBaseline: return 1;
  }
  return 1;
}

models::ModelConfig ModelConfigFor(const ExperimentConfig& config,
                                   models::ModelKind kind, double dt) {
  models::ModelConfig mc;
  mc.kind = kind;
  mc.hidden = config.hidden;
  mc.activation = config.activation == "relu" ? ad::Activation::kRelu
                                              : ad::Activation::kTanh;
  mc.dt = dt;
  mc.substeps = config.substeps;
  return mc;
}

models::TrainConfig TrainConfigFor(const ExperimentConfig& config,
                                   models::ModelKind kind, std::uint64_t seed) {
  models::TrainConfig tc;
  tc.horizon = HorizonFor(config, kind);
  tc.batch = config.batch;
  tc.lr = config.lr;
  tc.max_iterations = config.iterations;
  tc.noise_sigma = config.noise_sigma;
  tc.eval_every = config.eval_every;
  tc.probe_batch = config.probe_batch;
  tc.seed = seed;
  return tc;
}

rl::SacConfig SacConfigFor(const ExperimentConfig& config, std::uint64_t seed) {
  rl::SacConfig c = config.sac;
  c.seed = seed;
  return c;
}

}  // namespace dynode::cli
