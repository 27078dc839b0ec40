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

#include "crowdmarl/replay_buffer.h"

#include <string>
#include <utility>

#include "crowdmarl/errors.h"

namespace crowdmarl {

bool Transition::operator==(const Transition& other) const {
  return obs_window == other.obs_window &&
         joint_action == other.joint_action && payoffs == other.payoffs &&
         next_obs_window == other.next_obs_window;
}

Minibatch Stack(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw EmptyBufferError("cannot stack an empty batch");
  const Transition& first = transitions.front();
  const Eigen::Index obs = first.obs_window.size();
  const Eigen::Index n = first.joint_action.size();
  const auto m = static_cast<Eigen::Index>(transitions.size());
  Minibatch batch;
  batch.observations.resize(obs, m);
  batch.actions.resize(n, m);
  batch.payoffs.resize(n, m);
  batch.next_observations.resize(obs, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Transition& t = transitions[static_cast<std::size_t>(j)];
    if (t.obs_window.size() != obs || t.next_obs_window.size() != obs ||
        t.joint_action.size() != n || t.payoffs.size() != n) {
      throw ShapeError("Stack: transitions have inconsistent shapes");
    }
    batch.observations.col(j) =
        Eigen::Map<const Eigen::VectorXd>(t.obs_window.data(), obs);
    batch.next_observations.col(j) =
        Eigen::Map<const Eigen::VectorXd>(t.next_obs_window.data(), obs);
    batch.actions.col(j) = t.joint_action;
    batch.payoffs.col(j) = t.payoffs;
  }
  return batch;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, TransitionShape shape)
    : capacity_(capacity), shape_(shape) {
  if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
  if (shape_.window_rows <= 0 || shape_.n_agents <= 0) {
    throw ConfigError("replay buffer shape must be positive");
  }
}

std::uint64_t ReplayBuffer::Push(Transition t) {
  const auto rows = static_cast<Eigen::Index>(shape_.window_rows);
  const auto n = static_cast<Eigen::Index>(shape_.n_agents);
  if (t.obs_window.rows() != rows || t.obs_window.cols() != n ||
      t.next_obs_window.rows() != rows || t.next_obs_window.cols() != n ||
      t.joint_action.size() != n || t.payoffs.size() != n) {
    throw ShapeError("ReplayBuffer::Push: transition shape does not match buffer");
  }
  if (shape_.effort_cap > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = t.joint_action[i];
      if (!(x >= 0.0 && x <= shape_.effort_cap)) {
        throw ContractViolation("ReplayBuffer::Push: action " +
                                std::to_string(i) + " outside [0, cap]");
      }
    }
  }
  if (records_.size() < capacity_) {
    records_.push_back(std::move(t));
  } else {
    records_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  return insertions_++;
}

std::size_t ReplayBuffer::Slot(std::size_t i) const {
  return records_.size() < capacity_ ? i : (head_ + i) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= records_.size()) throw ContractViolation("ReplayBuffer::at: index out of range");
  return records_[Slot(i)];
}

std::uint64_t ReplayBuffer::insertion_index(std::size_t i) const {
  if (i >= records_.size()) {
    throw ContractViolation("ReplayBuffer::insertion_index: index out of range");
  }
  return insertions_ - records_.size() + i;
}

std::vector<std::size_t> ReplayBuffer::SampleIndices(std::size_t m,
                                                     Rng& rng) const {
  if (records_.empty()) throw EmptyBufferError("cannot sample an empty replay buffer");
  std::vector<std::size_t> indices(m);
  for (std::size_t& idx : indices) idx = rng.UniformIndex(records_.size());
  return indices;
}

std::vector<Transition> ReplayBuffer::Sample(std::size_t m, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(m);
  for (std::size_t idx : SampleIndices(m, rng)) out.push_back(at(idx));
  return out;
}

Minibatch ReplayBuffer::SampleBatch(std::size_t m, Rng& rng) const {
  const std::vector<std::size_t> indices = SampleIndices(m, rng);
  const auto obs = static_cast<Eigen::Index>(shape_.window_rows) * shape_.n_agents;
  const auto n = static_cast<Eigen::Index>(shape_.n_agents);
  const auto cols = static_cast<Eigen::Index>(m);
  Minibatch batch;
  batch.observations.resize(obs, cols);
  batch.actions.resize(n, cols);
  batch.payoffs.resize(n, cols);
  batch.next_observations.resize(obs, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Transition& t = at(indices[static_cast<std::size_t>(j)]);
    batch.observations.col(j) =
        Eigen::Map<const Eigen::VectorXd>(t.obs_window.data(), obs);
    batch.next_observations.col(j) =
        Eigen::Map<const Eigen::VectorXd>(t.next_obs_window.data(), obs);
    batch.actions.col(j) = t.joint_action;
    batch.payoffs.col(j) = t.payoffs;
  }
  return batch;
}

}  // namespace crowdmarl
