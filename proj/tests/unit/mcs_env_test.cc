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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "crowdmarl/errors.h"
#include "crowdmarl/rng.h"

namespace crowdmarl {
namespace {

MarkovDynamics Constant(double value) {
  MarkovDynamics m;
  m.values = {value};
  m.transition = {{1.0}};
  return m;
}

EnvConfig ConstantEnv(std::vector<double> q, int window = 2, int horizon = 5) {
  EnvConfig c;
  c.n_agents = static_cast<int>(q.size());
  c.window = window;
  c.horizon = horizon;
  c.costs.assign(q.size(), 0.0);
  for (double v : q) c.dynamics.push_back(Constant(v));
  return c;
}

std::vector<double> Vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Independent evaluation of the proportional share.
std::vector<double> ShareOracle(const std::vector<double>& x,
                                const std::vector<double>& q, double r) {
  double denom = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) denom += x[i] * q[i];
  std::vector<double> out(x.size(), 0.0);
  if (std::fabs(denom) < 1e-6) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * q[i] / denom * r;
  return out;
}

TEST(ResetTest, HistoryIsZeroPadded) {
  EnvConfig c = ConstantEnv({1.0, 2.0}, 3);
  const EnvState s = Reset(c, 1);
  ASSERT_EQ(s.qoi_history.rows(), 4);
  ASSERT_EQ(s.qoi_history.cols(), 2);
  EXPECT_TRUE(s.qoi_history.topRows(3).isZero(0.0));
  EXPECT_EQ(s.qoi_history(3, 0), 1.0);
  EXPECT_EQ(s.qoi_history(3, 1), 2.0);
  EXPECT_EQ(s.t, 0);
}

TEST(ResetTest, SameSeedSameHistory) {
  EnvConfig c;
  c.n_agents = 2;
  c.window = 4;
  c.costs = {0.1, 0.1};
  Rng gen(5);
  c.dynamics = {DefaultMarkov(gen), DefaultMarkov(gen)};
  const EnvState a = Reset(c, 31);
  const EnvState b = Reset(c, 31);
  EXPECT_EQ(a.qoi_history, b.qoi_history);
  EXPECT_EQ(a.dynamics, b.dynamics);
}

TEST(ResetTest, MarkovInitialStateEmitsItsValue) {
  MarkovDynamics m;
  m.values = {0.0, 0.0, 7.0};
  m.transition = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.initial_state = 2;
  EnvConfig c;
  c.n_agents = 1;
  c.window = 3;
  c.costs = {0.0};
  c.dynamics = {m};
  EXPECT_EQ(Reset(c, 0).qoi_history(3, 0), 7.0);
}

TEST(ResetTest, InvalidConfigListsViolations) {
  EnvConfig c = ConstantEnv({1.0, 1.0});
  c.costs = {0.1};
  c.denominator_guard = 0.0;
  c.effort_cap = -1.0;
  try {
    Reset(c, 0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations().size(), 3u);
  }
  EnvConfig d = ConstantEnv({1.0});
  d.budget_schedule = {1.0, 2.0};  // neither constant nor length T
  EXPECT_FALSE(Validate(d).empty());
  d.budget_schedule.assign(d.horizon, 3.0);
  EXPECT_TRUE(Validate(d).empty());
  d.discount = 1.5;
  EXPECT_FALSE(Validate(d).empty());
}

TEST(ComputeRewardsTest, WorkedInstances) {
  const double guard = 1e-6;
  EXPECT_EQ(Vec(ComputeRewards(std::vector<double>{1, 1}, std::vector<double>{1, 1}, 10, guard)),
            (std::vector<double>{5, 5}));
  const std::vector<double> x = {2, 1}, q = {0.5, 3};
  const auto r = Vec(ComputeRewards(x, q, 8, guard));
  const auto oracle = ShareOracle(x, q, 8);
  EXPECT_NEAR(r[0], 2.0, 1e-12);
  EXPECT_NEAR(r[1], 6.0, 1e-12);
  EXPECT_NEAR(r[0], oracle[0], 1e-12);
  EXPECT_NEAR(r[1], oracle[1], 1e-12);
  for (double budget : {1.0, 10.0, 123.0}) {
    EXPECT_EQ(Vec(ComputeRewards(std::vector<double>{1, 1}, std::vector<double>{1, -1},
                                 budget, guard)),
              (std::vector<double>{0, 0}));
  }
}

TEST(ComputeRewardsTest, EffortOutsideBoundsIsRejected) {
  EXPECT_THROW(ComputeRewards(std::vector<double>{-0.1, 1}, std::vector<double>{1, 1}, 10, 1e-6),
               ContractViolation);
  EXPECT_THROW(ComputeRewards(std::vector<double>{6, 1}, std::vector<double>{1, 1}, 10, 1e-6, 5),
               ContractViolation);
  EXPECT_THROW(ComputeRewards(std::vector<double>{1, 1}, std::vector<double>{1}, 10, 1e-6),
               ShapeError);
}

TEST(ComputePayoffsTest, WorkedInstances) {
  const auto single = Vec(ComputePayoffs(std::vector<double>{2}, std::vector<double>{3}, 12,
                                         std::vector<double>{1}, 1e-6));
  EXPECT_EQ(single, (std::vector<double>{10}));
  const auto u = Vec(ComputePayoffs(std::vector<double>{2, 1}, std::vector<double>{0.5, 3}, 8,
                                    std::vector<double>{0.2, 0.1}, 1e-6));
  EXPECT_NEAR(u[0], 1.6, 1e-12);
  EXPECT_NEAR(u[1], 5.9, 1e-12);
  const auto guarded = Vec(ComputePayoffs(std::vector<double>{1, 1}, std::vector<double>{1, -1},
                                          10, std::vector<double>{1, 1}, 1e-6));
  EXPECT_EQ(guarded, (std::vector<double>{-1, -1}));
}

TEST(ComputeRewardsTest, BudgetConservation) {
  Rng rng(123);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformIndex(8));
    std::vector<double> x(n), q(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.Uniform(0.0, 5.0);
      q[i] = rng.Uniform(-1.0, 2.0);
    }
    const double budget = rng.Uniform(0.1, 100.0);
    double denom = 0.0;
    for (int i = 0; i < n; ++i) denom += x[i] * q[i];
    const Eigen::VectorXd r = ComputeRewards(x, q, budget, 1e-6);
    if (std::fabs(denom) < 1e-6) {
      EXPECT_TRUE(r.isZero(0.0));
      continue;
    }
    ++checked;
    ASSERT_LE(std::fabs(r.sum() - budget), 1e-9 * budget) << trial;
  }
  EXPECT_GT(checked, 9900);
}

TEST(ComputeRewardsTest, ScaleInvariance) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + static_cast<int>(rng.UniformIndex(5));
    std::vector<double> x(n), q(n), scaled(n);
    const double lambda = rng.Uniform(1.0, 4.0);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.Uniform(0.0, 1.0);
      q[i] = rng.Uniform(0.1, 2.0);
      scaled[i] = lambda * x[i];
    }
    const Eigen::VectorXd a = ComputeRewards(x, q, 10.0, 1e-6);
    const Eigen::VectorXd b = ComputeRewards(scaled, q, 10.0, 1e-6);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(ComputeRewardsTest, MonotoneInOwnEffort) {
  Rng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x = {rng.Uniform(0.0, 4.0), rng.Uniform(0.1, 5.0), rng.Uniform(0.1, 5.0)};
    const std::vector<double> q = {rng.Uniform(0.1, 2.0), rng.Uniform(0.1, 2.0),
                                   rng.Uniform(0.1, 2.0)};
    const double before = ComputeRewards(x, q, 10.0, 1e-6)[0];
    x[0] += rng.Uniform(0.01, 1.0);
    EXPECT_GT(ComputeRewards(x, q, 10.0, 1e-6)[0], before);
  }
}

TEST(ComputePayoffsTest, ZeroEffortEarnsNothing) {
  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> x = {0.0, rng.Uniform(0.5, 5.0), rng.Uniform(0.5, 5.0)};
    const std::vector<double> q = {rng.Uniform(-1.0, 2.0), rng.Uniform(0.1, 2.0),
                                   rng.Uniform(0.1, 2.0)};
    const std::vector<double> c = {rng.Uniform(0.0, 2.0), 0.1, 0.1};
    EXPECT_EQ(ComputePayoffs(x, q, 10.0, c, 1e-6)[0], 0.0);
  }
}

TEST(ComputeRewardsTest, PermutationSymmetry) {
  Rng rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 4;
    std::vector<double> x(n), q(n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.Uniform(0.0, 5.0);
      q[i] = rng.Uniform(0.1, 2.0);
    }
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.UniformIndex(i + 1)]);
    std::vector<double> px(n), pq(n);
    for (int i = 0; i < n; ++i) {
      px[i] = x[perm[i]];
      pq[i] = q[perm[i]];
    }
    const Eigen::VectorXd r = ComputeRewards(x, q, 10.0, 1e-6);
    const Eigen::VectorXd pr = ComputeRewards(px, pq, 10.0, 1e-6);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(pr[i], r[perm[i]], 1e-12);
  }
}

TEST(StepTest, EpisodeEndsAfterHorizon) {
  const EnvConfig c = ConstantEnv({1.0, 1.0}, 2, 4);
  Rng rng(0);
  EnvState s = Reset(c, 0);
  const std::vector<double> x = {1.0, 1.0};
  for (int t = 0; t < c.horizon; ++t) {
    const StepOutcome out = Step(s, x, c, rng);
    EXPECT_EQ(out.done, out.next_state.t == c.horizon);
    EXPECT_EQ(out.next_state.t, t + 1);
    s = out.next_state;
  }
  EXPECT_THROW(Step(s, x, c, rng), EpisodeCompleteError);
}

TEST(StepTest, ZeroEffortHitsGuard) {
  EnvConfig c = ConstantEnv({1.0, 0.5});
  c.costs = {0.3, 0.4};
  Rng rng(0);
  const StepOutcome out = Step(Reset(c, 0), std::vector<double>{0, 0}, c, rng);
  EXPECT_TRUE(out.payoffs.isZero(0.0));
  EXPECT_TRUE(out.rewards.isZero(0.0));
}

TEST(StepTest, ConstantDynamicsRepeatPayoff) {
  const EnvConfig c = ConstantEnv({1.0, 1.0});
  Rng rng(0);
  EnvState s = Reset(c, 0);
  for (int t = 0; t < 2; ++t) {
    const StepOutcome out = Step(s, std::vector<double>{1, 1}, c, rng);
    EXPECT_EQ(Vec(out.payoffs), (std::vector<double>{5, 5}));
    s = out.next_state;
  }
}

TEST(StepTest, WindowShiftsByOneRow) {
  EnvConfig c;
  c.n_agents = 2;
  c.window = 3;
  c.horizon = 10;
  c.costs = {0.1, 0.1};
  c.dynamics = {SineDynamics{1.0, 7.0, 0.0, 0.0}, LinearDynamics{0.5, 4, 0.0}};
  Rng rng(0);
  EnvState s = Reset(c, 0);
  for (int t = 0; t < 6; ++t) {
    const StepOutcome out = Step(s, std::vector<double>{1, 1}, c, rng);
    EXPECT_EQ(out.next_state.qoi_history.topRows(3), s.qoi_history.bottomRows(3));
    EXPECT_NEAR(out.next_state.qoi_history(3, 0), std::sin(2.0 * M_PI * (t + 1) / 7.0), 1e-12);
    EXPECT_NEAR(out.next_state.qoi_history(3, 1), 0.5 * ((t + 1) % 4), 1e-12);
    s = out.next_state;
  }
}

TEST(StepTest, UsesBudgetSchedule) {
  EnvConfig c = ConstantEnv({1.0, 1.0}, 1, 3);
  c.budget_schedule = {2.0, 4.0, 6.0};
  Rng rng(0);
  EnvState s = Reset(c, 0);
  for (int t = 0; t < 3; ++t) {
    const StepOutcome out = Step(s, std::vector<double>{1, 1}, c, rng);
    EXPECT_EQ(out.rewards.sum(), 2.0 * (t + 1));
    s = out.next_state;
  }
}

TEST(ObservationTest, FlattensPublicWindow) {
  const EnvConfig c = ConstantEnv({1.0, 2.0}, 0);
  const EnvState s = Reset(c, 0);
  EXPECT_EQ(Observation(s, 0), (std::vector<double>{1, 2}));
  EXPECT_EQ(Observation(s, 0), Observation(s, 1));

  const EnvConfig one = ConstantEnv({3.0}, 2);
  EXPECT_EQ(Observation(Reset(one, 0), 0), (std::vector<double>{0, 0, 3}));
}

TEST(ObservationTest, IdenticalForEveryAgent) {
  EnvConfig c;
  c.n_agents = 3;
  c.window = 4;
  c.costs = {0.1, 0.1, 0.1};
  Rng gen(2);
  c.dynamics = {DefaultSine(0, 3), DefaultLinear(1, 3), DefaultMarkov(gen)};
  Rng rng(1);
  EnvState s = Reset(c, 3);
  for (int t = 0; t < 10; ++t) {
    const auto o = Observation(s, 0);
    ASSERT_EQ(static_cast<int>(o.size()), c.ObservationSize());
    EXPECT_EQ(o, Observation(s, 1));
    EXPECT_EQ(o, Observation(s, 2));
    s = Step(s, std::vector<double>{1, 2, 3}, c, rng).next_state;
  }
}

TEST(DiscountedReturnTest, WorkedInstances) {
  EXPECT_DOUBLE_EQ(DiscountedReturn(std::vector<double>{1, 2, 3}, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(DiscountedReturn(std::vector<double>{5}, 0.5), 2.5);
  const double oracle = 0.9 * (1.0 - std::pow(0.9, 10)) / (1.0 - 0.9);
  EXPECT_NEAR(DiscountedReturn(std::vector<double>(10, 1.0), 0.9), oracle, 1e-12);
  EXPECT_NEAR(oracle, 5.86189, 1e-5);
  EXPECT_EQ(DiscountedReturn(std::vector<double>{}, 0.9), 0.0);
}

}  // namespace
}  // namespace crowdmarl
