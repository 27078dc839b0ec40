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

#ifndef CROWDMARL_REPLAY_BUFFER_H_
#define CROWDMARL_REPLAY_BUFFER_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "crowdmarl/mcs_env.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {

// One environment step for all agents at once.
struct Transition {
  QoiWindow obs_window;
  Eigen::VectorXd joint_action;
  Eigen::VectorXd payoffs;
  QoiWindow next_obs_window;

  bool operator==(const Transition& other) const;
};

struct TransitionShape {
  int window_rows = 1;  // K + 1
  int n_agents = 1;
  double effort_cap = 0.0;  // <= 0 disables the bound check
};

// Columns of a stacked minibatch, one per sampled transition.
struct Minibatch {
  Eigen::MatrixXd observations;       // N(K+1) x M
  Eigen::MatrixXd actions;            // N x M
  Eigen::MatrixXd payoffs;            // N x M
  Eigen::MatrixXd next_observations;  // N(K+1) x M

  Eigen::Index size() const { return actions.cols(); }
};

Minibatch Stack(const std::vector<Transition>& transitions);

// Fixed-capacity FIFO ring with uniform sampling with replacement.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, TransitionShape shape);

  // Stores `t`, evicting the oldest record when full. Returns the insertion
  // index assigned to it.
  std::uint64_t Push(Transition t);

  std::vector<Transition> Sample(std::size_t m, Rng& rng) const;
  std::vector<std::size_t> SampleIndices(std::size_t m, Rng& rng) const;
  Minibatch SampleBatch(std::size_t m, Rng& rng) const;

  // Oldest-first access; i in [0, size()).
  const Transition& at(std::size_t i) const;
  std::uint64_t insertion_index(std::size_t i) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const { return insertions_; }
  bool empty() const { return records_.empty(); }

 private:
  std::size_t Slot(std::size_t i) const;

  std::size_t capacity_;
  TransitionShape shape_;
  std::vector<Transition> records_;
  std::size_t head_ = 0;  // slot of the oldest record once full
  std::uint64_t insertions_ = 0;
};

}  // namespace crowdmarl

#endif  // CROWDMARL_REPLAY_BUFFER_H_
