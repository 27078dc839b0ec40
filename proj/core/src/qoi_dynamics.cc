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

#include "crowdmarl/qoi_dynamics.h"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace crowdmarl {
namespace {

constexpr double kRowSumTolerance = 1e-9;

// Default signals stay positive; negative QoI comes from the Markov family
// or from explicit specs.
constexpr double kDefaultSineOffset = 1.5;
constexpr double kDefaultLinearOffset = 0.5;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void ValidateMarkov(const MarkovDynamics& m, std::vector<std::string>& out) {
  if (m.values.empty()) out.push_back("markov: values list is empty");
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (!std::isfinite(m.values[i])) {
      out.push_back("markov: value " + std::to_string(i) + " is not finite");
    }
  }
  if (m.transition.size() != m.values.size()) {
    out.push_back("markov: transition has " +
                  std::to_string(m.transition.size()) + " rows for " +
                  std::to_string(m.values.size()) + " states");
  }
  for (std::size_t r = 0; r < m.transition.size(); ++r) {
    const std::vector<double>& row = m.transition[r];
    if (row.size() != m.values.size()) {
      out.push_back("markov: row " + std::to_string(r) + " has " +
                    std::to_string(row.size()) + " entries, expected " +
                    std::to_string(m.values.size()));
    }
    double sum = 0.0;
    bool entries_ok = true;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) entries_ok = false;
      sum += p;
    }
    if (!entries_ok) {
      out.push_back("markov: row " + std::to_string(r) +
                    " has entries outside [0, 1]");
    }
    if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
      out.push_back("row " + std::to_string(r) + " sums to " + Num(sum));
    }
  }
  if (m.initial_state >= m.values.size()) {
    out.push_back("markov: initial_state " + std::to_string(m.initial_state) +
                  " is not a valid state index");
  }
}

std::size_t SampleRow(const std::vector<double>& row, double u) {
  double cumulative = 0.0;
  for (std::size_t s = 0; s < row.size(); ++s) {
    cumulative += row[s];
    if (u < cumulative) return s;
  }
  // Rounding left the CDF just short of 1; take the last reachable state.
  for (std::size_t s = row.size(); s-- > 0;) {
    if (row[s] > 0.0) return s;
  }
  return row.size() - 1;
}

}  // namespace

DynamicsKind KindOf(const DynamicsSpec& spec) {
  return static_cast<DynamicsKind>(spec.index());
}

std::string KindName(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::kSine:
      return "sine";
    case DynamicsKind::kLinear:
      return "linear";
    case DynamicsKind::kMarkov:
      return "markov";
  }
  return "unknown";
}

std::vector<std::string> Validate(const DynamicsSpec& spec) {
  std::vector<std::string> out;
  if (const auto* s = std::get_if<SineDynamics>(&spec)) {
    if (!(s->period > 0.0) || !std::isfinite(s->period)) {
      out.push_back("sine: period must be positive, got " + Num(s->period));
    }
    if (!std::isfinite(s->amplitude)) out.push_back("sine: amplitude is not finite");
    if (!std::isfinite(s->phase)) out.push_back("sine: phase is not finite");
    if (!std::isfinite(s->offset)) out.push_back("sine: offset is not finite");
  } else if (const auto* l = std::get_if<LinearDynamics>(&spec)) {
    if (l->period <= 0) {
      out.push_back("linear: period must be positive, got " +
                    std::to_string(l->period));
    }
    if (!std::isfinite(l->slope)) out.push_back("linear: slope is not finite");
    if (!std::isfinite(l->offset)) out.push_back("linear: offset is not finite");
  } else {
    ValidateMarkov(std::get<MarkovDynamics>(spec), out);
  }
  return out;
}

DynamicsState InitialState(const DynamicsSpec& spec) {
  DynamicsState state;
  state.kind = KindOf(spec);
  if (const auto* m = std::get_if<MarkovDynamics>(&spec)) {
    state.markov_state = m->initial_state;
  }
  return state;
}

QoiSample QoiAt(const DynamicsSpec& spec, const DynamicsState& state,
                Rng& rng) {
  QoiSample sample;
  sample.next_state = state;
  sample.next_state.t = state.t + 1;
  const double t = static_cast<double>(state.t);
  if (const auto* s = std::get_if<SineDynamics>(&spec)) {
    sample.q = s->offset +
               s->amplitude *
                   std::sin(2.0 * std::numbers::pi * t / s->period + s->phase);
  } else if (const auto* l = std::get_if<LinearDynamics>(&spec)) {
    sample.q = l->offset + l->slope * static_cast<double>(state.t % l->period);
  } else {
    const auto& m = std::get<MarkovDynamics>(spec);
    sample.q = m.values[state.markov_state];
    sample.next_state.markov_state =
        SampleRow(m.transition[state.markov_state], rng.Uniform01());
  }
  return sample;
}

SineDynamics DefaultSine(std::size_t agent, std::size_t n_agents) {
  const double frac = n_agents > 1 ? static_cast<double>(agent) /
                                          static_cast<double>(n_agents - 1)
                                    : 0.5;
  SineDynamics s;
  s.amplitude = 0.8 + 0.4 * frac;
  s.period = 15.0 + 10.0 * frac;
  s.phase = 2.0 * std::numbers::pi * static_cast<double>(agent) /
            static_cast<double>(n_agents == 0 ? 1 : n_agents);
  s.offset = kDefaultSineOffset;
  return s;
}

LinearDynamics DefaultLinear(std::size_t agent, std::size_t n_agents) {
  const double frac = n_agents > 1 ? static_cast<double>(agent) /
                                          static_cast<double>(n_agents - 1)
                                    : 0.5;
  LinearDynamics l;
  l.slope = 0.05 + 0.1 * frac;
  l.period = 20;
  l.offset = kDefaultLinearOffset;
  return l;
}

MarkovDynamics DefaultMarkov(Rng& rng) {
  constexpr std::size_t kStates = 5;
  MarkovDynamics m;
  m.values.resize(kStates);
  for (double& v : m.values) v = rng.Uniform(-1.0, 2.0);
  m.transition.assign(kStates, std::vector<double>(kStates));
  for (auto& row : m.transition) {
    double sum = 0.0;
    for (double& p : row) {
      // Keep every entry positive so the chain is ergodic.
      p = 0.05 + rng.Uniform01();
      sum += p;
    }
    for (double& p : row) p /= sum;
  }
  m.initial_state = 0;
  return m;
}

}  // namespace crowdmarl
