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

#include "crowdmarl/mcs_env.h"

#include <cmath>
#include <string>

#include "crowdmarl/errors.h"

namespace crowdmarl {
namespace {

void CheckEfforts(std::span<const double> effort, double effort_cap) {
  for (std::size_t i = 0; i < effort.size(); ++i) {
    if (!(effort[i] >= 0.0 && effort[i] <= effort_cap)) {
      throw ContractViolation("effort[" + std::to_string(i) + "] = " +
                              std::to_string(effort[i]) +
                              " is outside [0, " + std::to_string(effort_cap) +
                              "]");
    }
  }
}

}  // namespace

double EnvConfig::BudgetAt(int t) const {
  if (budget_schedule.size() == 1) return budget_schedule.front();
  return budget_schedule.at(static_cast<std::size_t>(t));
}

std::vector<std::string> Validate(const EnvConfig& config) {
  std::vector<std::string> out;
  if (config.n_agents <= 0) out.push_back("n_agents must be positive");
  if (config.horizon <= 0) out.push_back("horizon must be positive");
  if (config.window < 0) out.push_back("window must be non-negative");
  const auto n = static_cast<std::size_t>(std::max(config.n_agents, 0));
  if (config.costs.size() != n) {
    out.push_back("costs has " + std::to_string(config.costs.size()) +
                  " entries for " + std::to_string(n) + " agents");
  }
  for (std::size_t i = 0; i < config.costs.size(); ++i) {
    if (!(config.costs[i] >= 0.0) || !std::isfinite(config.costs[i])) {
      out.push_back("cost " + std::to_string(i) + " must be finite and >= 0");
    }
  }
  if (config.dynamics.size() != n) {
    out.push_back("dynamics has " + std::to_string(config.dynamics.size()) +
                  " entries for " + std::to_string(n) + " agents");
  }
  for (std::size_t i = 0; i < config.dynamics.size(); ++i) {
    for (const std::string& v : Validate(config.dynamics[i])) {
      out.push_back("dynamics[" + std::to_string(i) + "]: " + v);
    }
  }
  if (config.budget_schedule.empty()) {
    out.push_back("budget schedule is empty");
  } else if (config.budget_schedule.size() != 1 &&
             config.budget_schedule.size() !=
                 static_cast<std::size_t>(std::max(config.horizon, 0))) {
    out.push_back("budget schedule has " +
                  std::to_string(config.budget_schedule.size()) +
                  " entries, expected 1 or horizon");
  }
  for (double r : config.budget_schedule) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      out.push_back("budget entries must be finite and positive");
      break;
    }
  }
  if (!(config.denominator_guard > 0.0)) {
    out.push_back("denominator_guard must be positive");
  }
  if (!(config.effort_cap > 0.0) || !std::isfinite(config.effort_cap)) {
    out.push_back("effort_cap must be finite and positive");
  }
  if (!(config.discount >= 0.0 && config.discount <= 1.0)) {
    out.push_back("discount must lie in [0, 1]");
  }
  return out;
}

void CheckValid(const EnvConfig& config) {
  std::vector<std::string> violations = Validate(config);
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

Eigen::VectorXd ComputeRewards(std::span<const double> effort,
                               std::span<const double> qoi, double budget,
                               double guard, double effort_cap) {
  if (effort.size() != qoi.size()) {
    throw ShapeError("ComputeRewards: effort and qoi lengths differ");
  }
  CheckEfforts(effort, effort_cap);
  if (!(budget > 0.0)) throw ContractViolation("budget must be positive");
  const auto n = static_cast<Eigen::Index>(effort.size());
  Eigen::VectorXd contribution(n);
  for (Eigen::Index i = 0; i < n; ++i) contribution[i] = effort[i] * qoi[i];
  const double total = contribution.sum();
  if (!(std::abs(total) >= guard)) return Eigen::VectorXd::Zero(n);
  return contribution * (budget / total);
}

Eigen::VectorXd ComputePayoffs(std::span<const double> effort,
                               std::span<const double> qoi, double budget,
                               std::span<const double> costs, double guard,
                               double effort_cap) {
  if (costs.size() != effort.size()) {
    throw ShapeError("ComputePayoffs: costs and effort lengths differ");
  }
  Eigen::VectorXd payoff =
      ComputeRewards(effort, qoi, budget, guard, effort_cap);
  for (Eigen::Index i = 0; i < payoff.size(); ++i) {
    payoff[i] -= costs[i] * effort[i];
  }
  return payoff;
}

EnvState Reset(const EnvConfig& config, std::uint64_t seed) {
  CheckValid(config);
  Rng rng(seed);
  EnvState state;
  state.t = 0;
  state.qoi_history = QoiWindow::Zero(config.window + 1, config.n_agents);
  state.dynamics.reserve(config.dynamics.size());
  for (int i = 0; i < config.n_agents; ++i) {
    const DynamicsSpec& spec = config.dynamics[i];
    QoiSample sample = QoiAt(spec, InitialState(spec), rng);
    state.qoi_history(config.window, i) = sample.q;
    state.dynamics.push_back(sample.next_state);
  }
  return state;
}

StepOutcome Step(const EnvState& state, std::span<const double> effort,
                 const EnvConfig& config, Rng& rng) {
  if (state.t >= config.horizon) {
    throw EpisodeCompleteError("episode already reached its horizon");
  }
  if (effort.size() != static_cast<std::size_t>(config.n_agents)) {
    throw ShapeError("Step: expected " + std::to_string(config.n_agents) +
                     " efforts, got " + std::to_string(effort.size()));
  }
  const int k = config.window;
  const Eigen::VectorXd current = state.qoi_history.row(k).transpose();

  StepOutcome out;
  out.rewards = ComputeRewards(effort, {current.data(), static_cast<std::size_t>(current.size())},
                               config.BudgetAt(state.t),
                               config.denominator_guard, config.effort_cap);
  out.payoffs = out.rewards;
  for (int i = 0; i < config.n_agents; ++i) {
    out.payoffs[i] -= config.costs[i] * effort[i];
  }

  EnvState& next = out.next_state;
  next.t = state.t + 1;
  next.qoi_history.resize(k + 1, config.n_agents);
  if (k > 0) {
    next.qoi_history.topRows(k) = state.qoi_history.bottomRows(k);
  }
  next.dynamics.resize(state.dynamics.size());
  for (int i = 0; i < config.n_agents; ++i) {
    QoiSample sample = QoiAt(config.dynamics[i], state.dynamics[i], rng);
    next.qoi_history(k, i) = sample.q;
    next.dynamics[i] = sample.next_state;
  }
  out.done = next.t == config.horizon;
  return out;
}

std::vector<double> Observation(const EnvState& state, int agent) {
  if (agent < 0 || agent >= state.qoi_history.cols()) {
    throw ContractViolation("Observation: agent index " +
                            std::to_string(agent) + " out of range");
  }
  const double* data = state.qoi_history.data();
  return std::vector<double>(data, data + state.qoi_history.size());
}

double DiscountedReturn(std::span<const double> payoffs, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ContractViolation("discount must lie in [0, 1]");
  }
  double total = 0.0;
  double weight = 1.0;
  for (double u : payoffs) {
    weight *= gamma;
    total += weight * u;
  }
  return total;
}

}  // namespace crowdmarl
