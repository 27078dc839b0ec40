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

#include "crowdmarl/maddpg.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "crowdmarl/errors.h"

namespace crowdmarl {
namespace {

// Stream ids for DeriveSeed; fixed so traces are reproducible.
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kExploreStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kAgentStreamBase = 100;
constexpr std::uint64_t kEpisodeStreamBase = 1000000;

std::vector<int> Dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

int ObservationRows(const Agent& agent) {
  return agent.actor.input_size();
}

void CheckBatch(const Agent& agent, const Minibatch& batch) {
  const int obs = ObservationRows(agent);
  if (batch.observations.rows() != obs || batch.next_observations.rows() != obs ||
      batch.actions.rows() != agent.n_agents ||
      batch.payoffs.rows() != agent.n_agents ||
      batch.observations.cols() != batch.actions.cols() ||
      batch.next_observations.cols() != batch.actions.cols() ||
      batch.payoffs.cols() != batch.actions.cols()) {
    throw ShapeError("minibatch shape does not match the agents");
  }
  if (batch.size() == 0) throw EmptyBufferError("minibatch is empty");
}

// [observations ; actions], one sample per column.
Eigen::MatrixXd CriticInput(const Eigen::MatrixXd& observations,
                            const Eigen::MatrixXd& actions) {
  Eigen::MatrixXd input(observations.rows() + actions.rows(), observations.cols());
  input.topRows(observations.rows()) = observations;
  input.bottomRows(actions.rows()) = actions;
  return input;
}

Eigen::MatrixXd NextActions(std::span<const Agent> agents,
                            const Eigen::MatrixXd& next_observations,
                            bool use_targets) {
  Eigen::MatrixXd actions(static_cast<Eigen::Index>(agents.size()),
                          next_observations.cols());
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const Agent& a = agents[k];
    const Mlp& actor =
        use_targets && a.target_actor ? *a.target_actor : a.actor;
    actions.row(static_cast<Eigen::Index>(k)) =
        actor.Forward(next_observations).output.row(0);
  }
  return actions;
}

void CheckAgentIndex(int agent, std::size_t n) {
  if (agent < 0 || static_cast<std::size_t>(agent) >= n) {
    throw ContractViolation("agent index " + std::to_string(agent) +
                            " out of range");
  }
}

void Blend(Mlp& target, const Mlp& live, double tau) {
  auto& t = target.mutable_layers();
  const auto& l = live.layers();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].weight = tau * l[i].weight + (1.0 - tau) * t[i].weight;
    t[i].bias = tau * l[i].bias + (1.0 - tau) * t[i].bias;
  }
}

}  // namespace

std::vector<std::string> Validate(const TrainerConfig& c) {
  std::vector<std::string> out;
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) out.push_back("gamma must lie in [0, 1]");
  if (c.minibatch < 1) out.push_back("minibatch must be at least 1");
  if (c.episodes < 0) out.push_back("episodes must be non-negative");
  if (c.updates_per_step < 0) out.push_back("updates_per_step must be non-negative");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) out.push_back("tau must lie in (0, 1]");
  if (!(c.noise_initial_fraction >= 0.0)) {
    out.push_back("noise_initial must be non-negative");
  }
  if (!(c.noise_decay > 0.0 && c.noise_decay <= 1.0)) {
    out.push_back("noise_decay must lie in (0, 1]");
  }
  if (!(c.noise_floor >= 0.0)) out.push_back("noise_floor must be non-negative");
  if (!(c.actor_lr >= 0.0) || !(c.critic_lr >= 0.0)) {
    out.push_back("learning rates must be non-negative");
  }
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0) ||
      !(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) {
    out.push_back("adam betas must lie in [0, 1)");
  }
  if (!(c.adam_epsilon > 0.0)) out.push_back("adam_epsilon must be positive");
  for (int h : c.actor_hidden) {
    if (h <= 0) out.push_back("actor hidden widths must be positive");
  }
  for (int h : c.critic_hidden) {
    if (h <= 0) out.push_back("critic hidden widths must be positive");
  }
  if (c.actor_skip && c.actor_hidden.size() < 2) {
    out.push_back("actor skip link needs two hidden layers");
  }
  if (c.critic_skip && c.critic_hidden.size() < 2) {
    out.push_back("critic skip link needs two hidden layers");
  }
  if (c.buffer_capacity == 0) out.push_back("buffer_capacity must be positive");
  return out;
}

Agent MakeAgent(const EnvConfig& env, const TrainerConfig& trainer,
                std::uint64_t seed) {
  const int obs = env.ObservationSize();
  const int n = env.n_agents;
  MlpSpec actor_spec{Dims(obs, trainer.actor_hidden, 1),
                     OutputActivation::kScaledSigmoid, env.effort_cap,
                     trainer.actor_skip};
  MlpSpec critic_spec{Dims(obs + n, trainer.critic_hidden, 1),
                      OutputActivation::kIdentity, 1.0, trainer.critic_skip};
  Mlp actor = Mlp::Init(actor_spec, DeriveSeed(seed, 0));
  Mlp critic = Mlp::Init(critic_spec, DeriveSeed(seed, 1));
  AdamConfig actor_adam{trainer.actor_lr, trainer.adam_beta1,
                        trainer.adam_beta2, trainer.adam_epsilon};
  AdamConfig critic_adam{trainer.critic_lr, trainer.adam_beta1,
                         trainer.adam_beta2, trainer.adam_epsilon};
  AdamOptimizer actor_opt(actor, actor_adam);
  AdamOptimizer critic_opt(critic, critic_adam);
  std::optional<Mlp> target_actor;
  std::optional<Mlp> target_critic;
  if (trainer.use_targets) {
    target_actor = actor;
    target_critic = critic;
  }
  return Agent{std::move(actor),
               std::move(critic),
               std::move(target_actor),
               std::move(target_critic),
               std::move(actor_opt),
               std::move(critic_opt),
               trainer.noise_initial_fraction * env.effort_cap,
               env.effort_cap,
               n};
}

std::vector<Agent> MakeAgents(const EnvConfig& env,
                              const TrainerConfig& trainer) {
  CheckValid(env);
  std::vector<std::string> violations = Validate(trainer);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(env.n_agents));
  for (int i = 0; i < env.n_agents; ++i) {
    agents.push_back(MakeAgent(
        env, trainer,
        DeriveSeed(trainer.seed, kAgentStreamBase + static_cast<std::uint64_t>(i))));
  }
  return agents;
}

double Act(const Agent& agent, std::span<const double> observation,
           bool explore, Rng& rng) {
  if (static_cast<int>(observation.size()) != ObservationRows(agent)) {
    throw ShapeError("Act: observation has " + std::to_string(observation.size()) +
                     " entries, actor expects " +
                     std::to_string(ObservationRows(agent)));
  }
  double x = agent.actor.Forward(observation)[0];
  if (explore && agent.noise_stddev > 0.0) {
    x += agent.noise_stddev * rng.Normal();
  }
  return std::clamp(x, 0.0, agent.effort_cap);
}

double CriticValue(const Agent& agent, std::span<const double> observation,
                   std::span<const double> actions) {
  if (static_cast<int>(actions.size()) != agent.n_agents) {
    throw ShapeError("CriticValue: expected " + std::to_string(agent.n_agents) +
                     " actions, got " + std::to_string(actions.size()));
  }
  if (static_cast<int>(observation.size()) != ObservationRows(agent)) {
    throw ShapeError("CriticValue: observation size mismatch");
  }
  std::vector<double> input(observation.begin(), observation.end());
  input.insert(input.end(), actions.begin(), actions.end());
  return agent.critic.Forward(std::span<const double>(input))[0];
}

Eigen::MatrixXd ComputeTargets(std::span<const Agent> agents,
                               const Minibatch& batch, double gamma,
                               bool use_targets) {
  if (agents.empty()) throw ContractViolation("ComputeTargets: no agents");
  for (const Agent& a : agents) CheckBatch(a, batch);
  const Eigen::MatrixXd next_actions =
      NextActions(agents, batch.next_observations, use_targets);
  const Eigen::MatrixXd input = CriticInput(batch.next_observations, next_actions);
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(agents.size()), batch.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Agent& a = agents[i];
    const Mlp& critic =
        use_targets && a.target_critic ? *a.target_critic : a.critic;
    const auto row = static_cast<Eigen::Index>(i);
    targets.row(row) =
        batch.payoffs.row(row) + gamma * critic.Forward(input).output.row(0);
  }
  return targets;
}

Eigen::RowVectorXd ComputeTargetsFor(int agent, std::span<const Agent> agents,
                                     const Minibatch& batch, double gamma,
                                     bool use_targets) {
  CheckAgentIndex(agent, agents.size());
  const Agent& a = agents[static_cast<std::size_t>(agent)];
  CheckBatch(a, batch);
  if (gamma == 0.0) return batch.payoffs.row(agent);
  const Eigen::MatrixXd next_actions =
      NextActions(agents, batch.next_observations, use_targets);
  const Mlp& critic = use_targets && a.target_critic ? *a.target_critic : a.critic;
  const Eigen::MatrixXd q =
      critic.Forward(CriticInput(batch.next_observations, next_actions)).output;
  return batch.payoffs.row(agent) + gamma * q.row(0);
}

double UpdateCritic(Agent& agent, const Minibatch& batch,
                    const Eigen::RowVectorXd& targets) {
  CheckBatch(agent, batch);
  if (targets.size() != batch.size()) {
    throw ShapeError("UpdateCritic: one target per batch column required");
  }
  const ForwardCache cache =
      agent.critic.Forward(CriticInput(batch.observations, batch.actions));
  const Eigen::RowVectorXd diff = cache.output.row(0) - targets;
  const double m = static_cast<double>(batch.size());
  const double loss = diff.squaredNorm() / m;
  const Eigen::MatrixXd d_output = (2.0 / m) * diff;
  const BackwardResult back = agent.critic.Backward(cache, d_output);
  agent.critic_optimizer.Apply(agent.critic, back.grads);
  return loss;
}

Gradients ActorParameterGradient(const Mlp& actor, const ForwardCache& cache,
                                 const Eigen::RowVectorXd& action_gradient) {
  return actor.Backward(cache, Eigen::MatrixXd(action_gradient)).grads;
}

void AscendActor(Mlp& actor, AdamOptimizer& optimizer, const Gradients& ascent) {
  Gradients descent = ascent;
  for (DenseLayer& l : descent.layers) {
    l.weight = -l.weight;
    l.bias = -l.bias;
  }
  optimizer.Apply(actor, descent);
}

double ActorObjective(int agent, std::span<const Agent> agents,
                      const Minibatch& batch) {
  CheckAgentIndex(agent, agents.size());
  const Agent& a = agents[static_cast<std::size_t>(agent)];
  CheckBatch(a, batch);
  Eigen::MatrixXd actions = batch.actions;
  actions.row(agent) = a.actor.Forward(batch.observations).output.row(0);
  return a.critic.Forward(CriticInput(batch.observations, actions)).output.mean();
}

ActorGradient ComputeActorGradient(int agent, std::span<const Agent> agents,
                                   const Minibatch& batch) {
  CheckAgentIndex(agent, agents.size());
  const Agent& a = agents[static_cast<std::size_t>(agent)];
  CheckBatch(a, batch);
  const ForwardCache actor_cache = a.actor.Forward(batch.observations);
  Eigen::MatrixXd actions = batch.actions;
  actions.row(agent) = actor_cache.output.row(0);
  const ForwardCache critic_cache =
      a.critic.Forward(CriticInput(batch.observations, actions));
  const double m = static_cast<double>(batch.size());
  const BackwardResult critic_back = a.critic.Backward(
      critic_cache, Eigen::MatrixXd::Constant(1, batch.size(), 1.0 / m));
  const Eigen::RowVectorXd dq_dx =
      critic_back.d_input.row(batch.observations.rows() + agent);
  ActorGradient out;
  out.objective = critic_cache.output.mean();
  out.grads = ActorParameterGradient(a.actor, actor_cache, dq_dx);
  return out;
}

double UpdateActor(int agent, std::span<Agent> agents, const Minibatch& batch) {
  ActorGradient g = ComputeActorGradient(
      agent, std::span<const Agent>(agents.data(), agents.size()), batch);
  Agent& a = agents[static_cast<std::size_t>(agent)];
  AscendActor(a.actor, a.actor_optimizer, g.grads);
  return g.objective;
}

void SoftUpdateTargets(std::span<Agent> agents, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ContractViolation("SoftUpdateTargets: tau must lie in [0, 1]");
  }
  for (Agent& a : agents) {
    if (a.target_actor) Blend(*a.target_actor, a.actor, tau);
    if (a.target_critic) Blend(*a.target_critic, a.critic, tau);
  }
}

TrainResult Train(const EnvConfig& env, const TrainerConfig& trainer,
                  const EpisodeCallback& on_episode) {
  TrainResult result{MakeAgents(env, trainer), {}};
  std::vector<Agent>& agents = result.agents;
  TrainMetrics& metrics = result.metrics;
  const int n = env.n_agents;
  metrics.episode_payoffs = Eigen::MatrixXd::Zero(trainer.episodes, n);
  metrics.critic_losses.assign(static_cast<std::size_t>(n), {});

  ReplayBuffer buffer(trainer.buffer_capacity,
                      TransitionShape{env.window + 1, n, env.effort_cap});
  const std::size_t warmup =
      trainer.warmup > 0 ? trainer.warmup
                         : static_cast<std::size_t>(trainer.minibatch);
  Rng env_rng(DeriveSeed(trainer.seed, kEnvStream));
  Rng explore_rng(DeriveSeed(trainer.seed, kExploreStream));
  Rng sample_rng(DeriveSeed(trainer.seed, kSampleStream));
  std::vector<double> effort(static_cast<std::size_t>(n));

  for (int episode = 0; episode < trainer.episodes; ++episode) {
    metrics.noise_trace.push_back(agents.front().noise_stddev);
    EnvState state = Reset(
        env, DeriveSeed(trainer.seed,
                        kEpisodeStreamBase + static_cast<std::uint64_t>(episode)));
    Eigen::VectorXd totals = Eigen::VectorXd::Zero(n);
    bool done = false;
    while (!done) {
      const std::vector<double> obs = Observation(state, 0);
      for (int i = 0; i < n; ++i) {
        effort[static_cast<std::size_t>(i)] =
            Act(agents[static_cast<std::size_t>(i)], obs, true, explore_rng);
      }
      StepOutcome outcome = Step(state, effort, env, env_rng);
      totals += outcome.payoffs;
      buffer.Push(Transition{
          state.qoi_history,
          Eigen::Map<const Eigen::VectorXd>(effort.data(), n),
          outcome.payoffs, outcome.next_state.qoi_history});
      state = std::move(outcome.next_state);
      done = outcome.done;

      if (buffer.size() < warmup) continue;
      for (int u = 0; u < trainer.updates_per_step; ++u) {
        for (int i = 0; i < n; ++i) {
          const Minibatch batch = buffer.SampleBatch(
              static_cast<std::size_t>(trainer.minibatch), sample_rng);
          const Eigen::RowVectorXd y =
              ComputeTargetsFor(i, agents, batch, trainer.gamma,
                                trainer.use_targets);
          metrics.critic_losses[static_cast<std::size_t>(i)].push_back(
              UpdateCritic(agents[static_cast<std::size_t>(i)], batch, y));
          UpdateActor(i, agents, batch);
        }
        if (trainer.use_targets) SoftUpdateTargets(agents, trainer.tau);
      }
    }
    metrics.episode_payoffs.row(episode) = totals.transpose();
    for (Agent& a : agents) {
      a.noise_stddev = std::max(trainer.noise_floor, a.noise_stddev * trainer.noise_decay);
    }
    if (on_episode) on_episode(episode, totals);
  }
  return result;
}

Policy ActorPolicy(Mlp actor, double effort_cap) {
  return [actor = std::move(actor), effort_cap](std::span<const double> obs,
                                                Rng&) {
    return std::clamp(actor.Forward(obs)[0], 0.0, effort_cap);
  };
}

std::vector<Policy> ExtractPolicies(std::span<const Agent> agents) {
  std::vector<Policy> policies;
  policies.reserve(agents.size());
  for (const Agent& a : agents) {
    policies.push_back(ActorPolicy(a.actor, a.effort_cap));
  }
  return policies;
}

EvaluationResult Evaluate(std::span<const Policy> policies,
                          const EnvConfig& env, int episodes,
                          std::uint64_t seed, bool discounted) {
  CheckValid(env);
  if (static_cast<int>(policies.size()) != env.n_agents) {
    throw ShapeError("Evaluate: one policy per agent required");
  }
  if (episodes < 0) throw ContractViolation("Evaluate: episodes must be >= 0");
  const int n = env.n_agents;
  EvaluationResult result;
  result.episode_payoffs = Eigen::MatrixXd::Zero(episodes, n);
  Rng env_rng(DeriveSeed(seed, kEnvStream));
  Rng policy_rng(DeriveSeed(seed, kExploreStream));
  std::vector<double> effort(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> trace(static_cast<std::size_t>(n));
  for (int episode = 0; episode < episodes; ++episode) {
    EnvState state = Reset(
        env, DeriveSeed(seed, kEpisodeStreamBase + static_cast<std::uint64_t>(episode)));
    for (auto& t : trace) t.clear();
    bool done = false;
    while (!done) {
      const std::vector<double> obs = Observation(state, 0);
      for (int i = 0; i < n; ++i) {
        effort[static_cast<std::size_t>(i)] =
            policies[static_cast<std::size_t>(i)](obs, policy_rng);
      }
      StepOutcome outcome = Step(state, effort, env, env_rng);
      for (int i = 0; i < n; ++i) {
        trace[static_cast<std::size_t>(i)].push_back(outcome.payoffs[i]);
      }
      state = std::move(outcome.next_state);
      done = outcome.done;
    }
    for (int i = 0; i < n; ++i) {
      const auto& payoffs = trace[static_cast<std::size_t>(i)];
      double total = 0.0;
      if (discounted) {
        total = DiscountedReturn(payoffs, env.discount);
      } else {
        for (double u : payoffs) total += u;
      }
      result.episode_payoffs(episode, i) = total;
    }
  }
  if (episodes > 0) {
    result.mean = result.episode_payoffs.colwise().mean().transpose();
    result.variance =
        (result.episode_payoffs.rowwise() - result.mean.transpose())
            .array()
            .square()
            .colwise()
            .mean()
            .transpose();
  } else {
    result.mean = Eigen::VectorXd::Zero(n);
    result.variance = Eigen::VectorXd::Zero(n);
  }
  return result;
}

}  // namespace crowdmarl
