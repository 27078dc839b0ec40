// Copyright 2026 The crowdmarl Authors.
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

#ifndef CROWDMARL_EXPERIMENT_CONFIG_H_
#define CROWDMARL_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "crowdmarl/maddpg.h"
#include "crowdmarl/mcs_env.h"

namespace crowdmarl {

struct ExperimentConfig {
  EnvConfig env;
  TrainerConfig trainer;
  // "sine", "linear", "markov", "mixed", or "custom" when the file lists
  // per-agent dynamics explicitly.
  std::string dynamics_family = "sine";
  int runs = 10;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::vector<int> k_sweep = {10, 30, 50, 100};
  std::vector<std::string> sweep_families = {"sine", "linear", "markov", "mixed"};
  int eval_episodes = 10;
  bool discounted = false;
};

// Four agents, sine dynamics, T = 45, K = 10.
ExperimentConfig DefaultExperimentConfig();

// Per-agent dynamics for a named family. Markov chains are drawn from a
// stream derived from `seed`.
std::vector<DynamicsSpec> MakeDynamicsFamily(const std::string& family,
                                             int n_agents, std::uint64_t seed);

std::vector<std::string> Validate(const ExperimentConfig& config);

// Parses the JSON config format described in docs/config.md. Missing keys
// take defaults, unknown keys are rejected, and parse errors carry line and
// column. Throws ConfigError.
ExperimentConfig ParseConfig(const std::string& text,
                             const std::string& source = "<config>");
// As ParseConfig; IoError if the file cannot be read.
ExperimentConfig LoadConfig(const std::string& path);

// Fully resolved config, in the same format ParseConfig reads.
std::string ConfigToText(const ExperimentConfig& config);

// Rebuilds env.dynamics for a given family and window length, keeping
// everything else.
ExperimentConfig WithFamily(ExperimentConfig config, const std::string& family);

}  // namespace crowdmarl

#endif  // CROWDMARL_EXPERIMENT_CONFIG_H_
