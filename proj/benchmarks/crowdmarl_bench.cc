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

#include <vector>

#include <benchmark/benchmark.h>

#include "crowdmarl/experiment_config.h"
#include "crowdmarl/maddpg.h"
#include "crowdmarl/mcs_env.h"
#include "crowdmarl/replay_buffer.h"
#include "crowdmarl/rng.h"
#include "crowdmarl/tensor_nn.h"

namespace crowdmarl {
namespace {

void BM_ComputeRewards(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<double> x(n), q(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.Uniform(0, 5);
    q[i] = rng.Uniform(-1, 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ComputeRewards(x, q, 10.0, 1e-6));
}
BENCHMARK(BM_ComputeRewards)->Arg(4)->Arg(64);

MlpSpec CriticSpec(int window) {
  MlpSpec s;
  s.layer_dims = {4 * (window + 1) + 4, 64, 64, 1};
  s.use_skip = true;
  return s;
}

void BM_CriticForwardBackward(benchmark::State& state) {
  const Mlp critic = Mlp::Init(CriticSpec(static_cast<int>(state.range(0))), 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(critic.input_size(), 64);
  const Eigen::MatrixXd d = Eigen::MatrixXd::Ones(1, 64);
  for (auto _ : state) {
    const ForwardCache cache = critic.Forward(x);
    benchmark::DoNotOptimize(critic.Backward(cache, d));
  }
}
BENCHMARK(BM_CriticForwardBackward)->Arg(10)->Arg(100);

void BM_ReplaySampleBatch(benchmark::State& state) {
  ReplayBuffer buffer(100000, TransitionShape{11, 4, 5.0});
  for (int k = 0; k < 5000; ++k) {
    buffer.Push(Transition{QoiWindow::Random(11, 4), Eigen::VectorXd::Constant(4, 1.0),
                           Eigen::VectorXd::Random(4), QoiWindow::Random(11, 4)});
  }
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(buffer.SampleBatch(64, rng));
}
BENCHMARK(BM_ReplaySampleBatch);

// One update round: every agent's critic and actor on its own minibatch.
void BM_UpdateRound(benchmark::State& state) {
  const ExperimentConfig config = DefaultExperimentConfig();
  std::vector<Agent> agents = MakeAgents(config.env, config.trainer);
  const int obs = config.env.ObservationSize();
  Minibatch b;
  b.observations = Eigen::MatrixXd::Random(obs, 64);
  b.next_observations = Eigen::MatrixXd::Random(obs, 64);
  b.actions = (Eigen::MatrixXd::Random(4, 64).array() + 1.0).matrix() * 2.5;
  b.payoffs = Eigen::MatrixXd::Random(4, 64);
  for (auto _ : state) {
    for (int i = 0; i < 4; ++i) {
      const Eigen::RowVectorXd y = ComputeTargetsFor(i, agents, b, 0.9, true);
      UpdateCritic(agents[i], b, y);
      UpdateActor(i, agents, b);
    }
    SoftUpdateTargets(agents, 0.01);
  }
}
BENCHMARK(BM_UpdateRound)->Unit(benchmark::kMillisecond);

void BM_TrainEpisode(benchmark::State& state) {
  ExperimentConfig config = DefaultExperimentConfig();
  config.trainer.episodes = 2;
  for (auto _ : state) benchmark::DoNotOptimize(Train(config.env, config.trainer));
}
BENCHMARK(BM_TrainEpisode)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
}  // namespace crowdmarl

BENCHMARK_MAIN();
