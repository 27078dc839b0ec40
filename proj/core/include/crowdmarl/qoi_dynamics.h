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

#ifndef CROWDMARL_QOI_DYNAMICS_H_
#define CROWDMARL_QOI_DYNAMICS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "crowdmarl/rng.h"

namespace crowdmarl {

// q(t) = offset + amplitude * sin(2*pi*t/period + phase).
struct SineDynamics {
  double amplitude = 1.0;
  double period = 20.0;  // steps
  double phase = 0.0;    // radians
  double offset = 0.0;
};

// Sawtooth ramp: q(t) = offset + slope * (t mod period).
struct LinearDynamics {
  double slope = 0.1;
  std::int64_t period = 20;
  double offset = 0.0;
};

// Finite chain; state s emits values[s] and moves according to row s.
struct MarkovDynamics {
  std::vector<double> values;
  std::vector<std::vector<double>> transition;
  std::size_t initial_state = 0;
};

using DynamicsSpec = std::variant<SineDynamics, LinearDynamics, MarkovDynamics>;

enum class DynamicsKind { kSine, kLinear, kMarkov };

DynamicsKind KindOf(const DynamicsSpec& spec);
std::string KindName(DynamicsKind kind);

struct DynamicsState {
  DynamicsKind kind = DynamicsKind::kSine;
  std::size_t markov_state = 0;  // meaningful for kMarkov only
  std::int64_t t = 0;

  bool operator==(const DynamicsState&) const = default;
};

// Every invariant violation of `spec`, as readable messages. Empty means ok.
std::vector<std::string> Validate(const DynamicsSpec& spec);

DynamicsState InitialState(const DynamicsSpec& spec);

struct QoiSample {
  double q = 0.0;
  DynamicsState next_state;
};

// Emits the QoI for `state` and the successor state (t + 1). Only Markov
// specs consume randomness: one uniform draw, inverted against the CDF of the
// current transition row.
QoiSample QoiAt(const DynamicsSpec& spec, const DynamicsState& state, Rng& rng);

// Default dynamics families. Parameters spread evenly across agents so that
// no two agents share a frequency, amplitude or chain.
SineDynamics DefaultSine(std::size_t agent, std::size_t n_agents);
LinearDynamics DefaultLinear(std::size_t agent, std::size_t n_agents);
// Five states, values uniform in [-1, 2], random row-stochastic matrix.
MarkovDynamics DefaultMarkov(Rng& rng);

}  // namespace crowdmarl

#endif  // CROWDMARL_QOI_DYNAMICS_H_
