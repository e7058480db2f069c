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

#include "dynode/data/dataset_io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dynode/common/errors.h"
#include "dynode/envs/constants.h"

namespace dynode::data {
namespace {

namespace fs = std::filesystem;

std::string EpisodeFileName(std::size_t index) {
  return fmt::format("episode_{:04d}.csv", index);
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string EpisodeCsv(const Episode& episode, std::size_t n, std::size_t m) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "step");
  for (std::size_t i = 0; i < n; ++i) fmt::format_to(std::back_inserter(out), ",s{}", i);
  for (std::size_t i = 0; i < m; ++i) fmt::format_to(std::back_inserter(out), ",a{}", i);
  fmt::format_to(std::back_inserter(out), ",r,done\n");
  for (std::size_t t = 0; t < episode.states.size(); ++t) {
    const bool last = t == episode.length();
    fmt::format_to(std::back_inserter(out), "{}", t);
    for (double v : episode.states[t]) fmt::format_to(std::back_inserter(out), ",{}", v);
    if (last) {
      for (std::size_t i = 0; i < m; ++i) fmt::format_to(std::back_inserter(out), ",");
      fmt::format_to(std::back_inserter(out), ",,{}\n", episode.terminated ? 1 : 0);
    } else {
      for (double v : episode.actions[t]) fmt::format_to(std::back_inserter(out), ",{}", v);
      fmt::format_to(std::back_inserter(out), ",{},0\n", episode.rewards[t]);
    }
  }
  return fmt::to_string(out);
}

std::vector<std::string> SplitCells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseNumber(const std::string& cell, const fs::path& path) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(path.string() + ": bad number '" + cell + "'");
  }
  return value;
}

}  // namespace

void SaveDataset(const fs::path& dir, const ReplayBuffer& buffer,
                 const DatasetInfo& info) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nlohmann::ordered_json manifest;
  manifest["format"] = "dynode-dataset-1";
  manifest["env"] = info.env;
  manifest["env_constants_version"] = envs::kConstantsVersion;
  manifest["seed"] = info.seed;
  manifest["episode_length"] = info.episode_length;
  manifest["state_dim"] = buffer.state_dim();
  manifest["action_dim"] = buffer.action_dim();
  manifest["n_samples"] = buffer.size();
  manifest["n_episodes"] = buffer.episodes().size();
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < buffer.episodes().size(); ++e) {
    const std::string name = EpisodeFileName(e);
    WriteFile(dir / name, EpisodeCsv(buffer.episodes()[e], buffer.state_dim(),
                                     buffer.action_dim()));
    files.push_back(name);
  }
  manifest["files"] = files;
  WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
}

ReplayBuffer LoadDataset(const fs::path& dir, DatasetInfo* info) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(ReadFile(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
  std::size_t n = 0, m = 0;
  std::vector<std::string> files;
  try {
    n = manifest.at("state_dim").get<std::size_t>();
    m = manifest.at("action_dim").get<std::size_t>();
    files = manifest.at("files").get<std::vector<std::string>>();
    if (info != nullptr) {
      info->env = manifest.at("env").get<std::string>();
      info->seed = manifest.at("seed").get<std::uint64_t>();
      info->episode_length = manifest.at("episode_length").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "manifest.json").string() + ": " + e.what());
  }
  ReplayBuffer buffer(n, m);
  for (const std::string& name : files) {
    const fs::path path = dir / name;
    std::istringstream in(ReadFile(path));
    std::string line;
    std::getline(in, line);  // header
    std::vector<Vec> states;
    std::vector<Vec> actions;
    std::vector<double> rewards;
    bool terminated = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = SplitCells(line);
      if (cells.size() != 1 + n + m + 2) {
        throw IoError(path.string() + ": wrong column count");
      }
      Vec s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = ParseNumber(cells[1 + i], path);
      states.push_back(std::move(s));
      if (cells[1 + n].empty()) {
        terminated = cells.back() == "1";
        break;
      }
      Vec a(m);
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = ParseNumber(cells[1 + n + i], path);
      }
      actions.push_back(std::move(a));
      rewards.push_back(ParseNumber(cells[1 + n + m], path));
    }
    if (actions.empty() || states.size() != actions.size() + 1) {
      throw IoError(path.string() + ": missing final state row");
    }
    for (std::size_t t = 0; t < actions.size(); ++t) {
      const bool done = terminated && t + 1 == actions.size();
      buffer.Add({states[t], actions[t], rewards[t], states[t + 1], done});
    }
    buffer.CloseEpisode();
  }
  return buffer;
}

}  // namespace dynode::data
