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

#ifndef CROWDMARL_MADDPG_H_
#define CROWDMARL_MADDPG_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crowdmarl/mcs_env.h"
#include "crowdmarl/replay_buffer.h"
#include "crowdmarl/rng.h"
#include "crowdmarl/tensor_nn.h"

namespace crowdmarl {

struct TrainerConfig {
  double gamma = 0.9;
  int minibatch = 64;
  int episodes = 150;
  int updates_per_step = 1;
  // Exploration noise std starts at noise_initial_fraction * effort_cap and
  // decays geometrically per episode down to noise_floor.
  double noise_initial_fraction = 0.5;
  double noise_decay = 0.97;
  double noise_floor = 0.02;
  double tau = 0.01;
  bool use_targets = true;
  std::uint64_t seed = 1;

  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  std::vector<int> actor_hidden = {64, 64};
  std::vector<int> critic_hidden = {64, 64};
  bool actor_skip = false;
  bool critic_skip = true;

  std::size_t buffer_capacity = 100000;
  // Updates start once the buffer holds this many records; 0 means
  // `minibatch`.
  std::size_t warmup = 0;
};

std::vector<std::string> Validate(const TrainerConfig& config);

// Actor: public QoI window -> own effort. Critic: window plus all N efforts
// -> value. Target copies exist only when training with targets.
struct Agent {
  Mlp actor;
  Mlp critic;
  std::optional<Mlp> target_actor;
  std::optional<Mlp> target_critic;
  AdamOptimizer actor_optimizer;
  AdamOptimizer critic_optimizer;
  double noise_stddev = 0.0;
  double effort_cap = 1.0;
  int n_agents = 1;
};

Agent MakeAgent(const EnvConfig& env, const TrainerConfig& trainer,
                std::uint64_t seed);
std::vector<Agent> MakeAgents(const EnvConfig& env,
                              const TrainerConfig& trainer);

// Greedy actor output, plus clamped Gaussian noise when exploring.
double Act(const Agent& agent, std::span<const double> observation,
           bool explore, Rng& rng);

// Throws ShapeError unless `actions` has exactly N entries.
double CriticValue(const Agent& agent, std::span<const double> observation,
                   std::span<const double> actions);

// Bootstrapped targets y = U_i + gamma * Q_i(next window, x'), where every
// x'_k comes from agent k's actor on the next window. Returns N x M.
Eigen::MatrixXd ComputeTargets(std::span<const Agent> agents,
                               const Minibatch& batch, double gamma,
                               bool use_targets);
Eigen::RowVectorXd ComputeTargetsFor(int agent, std::span<const Agent> agents,
                                     const Minibatch& batch, double gamma,
                                     bool use_targets);

// One optimizer step on mean squared TD error; returns the loss before it.
double UpdateCritic(Agent& agent, const Minibatch& batch,
                    const Eigen::RowVectorXd& targets);

// Mean critic value over the batch with agent i's action re-produced by its
// live actor and every other action taken from the batch.
double ActorObjective(int agent, std::span<const Agent> agents,
                      const Minibatch& batch);

struct ActorGradient {
  double objective = 0.0;
  Gradients grads;  // ascent direction of the objective w.r.t. theta_i
};
ActorGradient ComputeActorGradient(int agent, std::span<const Agent> agents,
                                   const Minibatch& batch);

// Chains dQ/dx (one entry per batch column, already averaged) through the
// actor. `cache` must come from actor.Forward on the batch observations.
Gradients ActorParameterGradient(const Mlp& actor, const ForwardCache& cache,
                                 const Eigen::RowVectorXd& action_gradient);
void AscendActor(Mlp& actor, AdamOptimizer& optimizer, const Gradients& ascent);

// One ascent step on ActorObjective; returns the objective before it.
double UpdateActor(int agent, std::span<Agent> agents, const Minibatch& batch);

// target <- tau * live + (1 - tau) * target.
void SoftUpdateTargets(std::span<Agent> agents, double tau);

struct TrainMetrics {
  Eigen::MatrixXd episode_payoffs;                 // episodes x N
  std::vector<std::vector<double>> critic_losses;  // per agent, per update
  std::vector<double> noise_trace;                 // per episode
};

struct TrainResult {
  std::vector<Agent> agents;
  TrainMetrics metrics;
};

using EpisodeCallback =
    std::function<void(int episode, const Eigen::VectorXd& payoffs)>;

TrainResult Train(const EnvConfig& env, const TrainerConfig& trainer,
                  const EpisodeCallback& on_episode = {});

// Decentralized execution: a policy sees only the public observation.
using Policy = std::function<double(std::span<const double> observation, Rng& rng)>;

Policy ActorPolicy(Mlp actor, double effort_cap);
// Copies the actors; critics are left behind.
std::vector<Policy> ExtractPolicies(std::span<const Agent> agents);

struct EvaluationResult {
  Eigen::MatrixXd episode_payoffs;  // episodes x N
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // population variance over episodes
};

EvaluationResult Evaluate(std::span<const Policy> policies,
                          const EnvConfig& env, int episodes,
                          std::uint64_t seed, bool discounted = false);

}  // namespace crowdmarl

#endif  // CROWDMARL_MADDPG_H_
