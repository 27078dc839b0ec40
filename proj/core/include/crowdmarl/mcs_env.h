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

#ifndef CROWDMARL_MCS_ENV_H_
#define CROWDMARL_MCS_ENV_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crowdmarl/qoi_dynamics.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {

// (K+1) x N window of QoI values, oldest row first. Row-major so that the
// flattened observation is a plain copy of the storage.
using QoiWindow =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EnvConfig {
  int n_agents = 4;
  int horizon = 45;  // T
  int window = 10;   // K
  // Either a single constant budget or one entry per step.
  std::vector<double> budget_schedule = {10.0};
  std::vector<double> costs;
  std::vector<DynamicsSpec> dynamics;
  double denominator_guard = 1e-6;
  double effort_cap = 5.0;
  double discount = 0.9;

  double BudgetAt(int t) const;
  int ObservationSize() const { return n_agents * (window + 1); }
};

std::vector<std::string> Validate(const EnvConfig& config);
// Throws ConfigError listing every violation.
void CheckValid(const EnvConfig& config);

struct EnvState {
  int t = 0;
  QoiWindow qoi_history;
  // Per-agent states that will emit q at step t + 1.
  std::vector<DynamicsState> dynamics;
};

struct StepOutcome {
  Eigen::VectorXd rewards;
  Eigen::VectorXd payoffs;
  EnvState next_state;
  bool done = false;
};

// Proportional share of the budget: r_i = x_i q_i / sum_j x_j q_j * R. All
// rewards are zero when |sum_j x_j q_j| < guard.
Eigen::VectorXd ComputeRewards(
    std::span<const double> effort, std::span<const double> qoi, double budget,
    double guard, double effort_cap = std::numeric_limits<double>::infinity());

// U_i = r_i - c_i x_i.
Eigen::VectorXd ComputePayoffs(
    std::span<const double> effort, std::span<const double> qoi, double budget,
    std::span<const double> costs, double guard,
    double effort_cap = std::numeric_limits<double>::infinity());

EnvState Reset(const EnvConfig& config, std::uint64_t seed);

// Settles payoffs with q_t and R_t, then advances every agent's dynamics.
StepOutcome Step(const EnvState& state, std::span<const double> effort,
                 const EnvConfig& config, Rng& rng);

// Public information only: the flattened QoI window, identical for all
// agents. Efforts never appear here.
std::vector<double> Observation(const EnvState& state, int agent);

// sum_{t=1..T} gamma^t U_t.
double DiscountedReturn(std::span<const double> payoffs, double gamma);

}  // namespace crowdmarl

#endif  // CROWDMARL_MCS_ENV_H_
