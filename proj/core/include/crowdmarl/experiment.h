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

#ifndef CROWDMARL_EXPERIMENT_H_
#define CROWDMARL_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crowdmarl/experiment_config.h"
#include "crowdmarl/maddpg.h"

namespace crowdmarl {

struct RunRecord {
  std::uint64_t seed = 0;
  Eigen::MatrixXd episode_payoffs;  // episodes x N, training episodes
  Eigen::VectorXd eval_mean;        // greedy evaluation, per agent
  Eigen::VectorXd eval_variance;
  double wall_seconds = 0.0;  // reported on the log only, never written
};

struct RunOptions {
  bool write_files = true;
  bool write_checkpoints = true;
  // Receives progress lines; may be empty.
  std::function<void(const std::string&)> log;
};

// seed_r = DeriveSeed(master, r) for r in [0, runs).
std::vector<std::uint64_t> RunSeeds(const ExperimentConfig& config);

// Trains and evaluates once. `agents_out`, when given, receives the trained
// agents.
RunRecord RunSingle(const ExperimentConfig& config, std::uint64_t run_seed,
                    std::vector<Agent>* agents_out = nullptr);

// Output layout under output_dir:
//   config.resolved.json
//   runs/run_<r>.csv          episode,agent,payoff
//   aggregate.csv             episode,agent,mean,variance  (across runs)
//   evaluation.csv            run,seed,agent,mean,variance
//   checkpoints/run_<r>/agent_<i>.json
std::vector<RunRecord> RunExperiment(const ExperimentConfig& config,
                                     const RunOptions& options = {});

struct AggregateRow {
  int episode;
  int agent;
  double mean;
  double variance;  // population variance across runs
};
std::vector<AggregateRow> Aggregate(const std::vector<RunRecord>& records);

void WriteRunCsv(const std::string& path, const RunRecord& record);
void WriteAggregateCsv(const std::string& path,
                       const std::vector<RunRecord>& records);
void WriteEvaluationCsv(const std::string& path,
                        const std::vector<RunRecord>& records);
// Reads a per-run CSV back; the seed is not stored there and is left 0.
RunRecord ReadRunCsv(const std::string& path);
// Every runs/run_<r>.csv under `dir`, ordered by r.
std::vector<RunRecord> ReadRunDirectory(const std::string& dir);

struct SweepCell {
  std::string family;
  int window = 0;
  double mean_reward = 0.0;  // over agents and runs
  std::vector<double> run_means;  // one per run, averaged over agents
  std::optional<double> reference;
};

struct SweepTable {
  std::vector<std::string> families;
  std::vector<int> windows;
  std::vector<SweepCell> cells;  // family-major

  const SweepCell& at(const std::string& family, int window) const;
};

// Published accumulated-reward grid for K in {10, 30, 50, 100}.
std::optional<double> ReferenceReward(const std::string& family, int window);

// Runs the full experiment for every (family, K) pair. Per-pair outputs go to
// output_dir/sweep/<family>_k<K>/, the table to sweep.csv and sweep.txt.
SweepTable SweepMemoryLength(const ExperimentConfig& config,
                             const RunOptions& options = {});
void WriteSweepCsv(const std::string& path, const SweepTable& table);
std::string RenderSweepTable(const SweepTable& table);

enum class BaselineKind { kRandom, kConstant, kZero };

// Random draws uniformly from [0, effort_cap] with the evaluation rng.
// ContractViolation if a constant effort lies outside [0, effort_cap].
Policy BaselinePolicy(BaselineKind kind, double effort_cap,
                      double constant_effort = 0.0);

struct BestResponse {
  double closed_form = 0.0;
  double grid = 0.0;
};

// argmax over x in [0, x_max] of x q R / (x q + S) - c x, by closed form and
// by grid search with step 1e-4. Throws ContractViolation on bad inputs and
// std::logic_error if the two disagree by more than 1e-3.
BestResponse BestResponseDetail(double qoi, double others, double budget,
                                double cost, double effort_cap);
double BestResponseOracle(double qoi, double others, double budget,
                          double cost, double effort_cap);

// Symmetric interior equilibrium with q == 1 for every agent:
// x* = R (N - 1) / (N^2 c), payoff R / N^2.
struct SymmetricEquilibrium {
  double effort = 0.0;
  double payoff = 0.0;
};
SymmetricEquilibrium SymmetricStaticEquilibrium(int n_agents, double budget,
                                                double cost);

}  // namespace crowdmarl

#endif  // CROWDMARL_EXPERIMENT_H_
