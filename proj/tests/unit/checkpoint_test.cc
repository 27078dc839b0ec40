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

#include "crowdmarl/checkpoint.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "crowdmarl/errors.h"
#include "test_util.h"

namespace crowdmarl {
namespace {

MlpSpec Spec(std::vector<int> dims, OutputActivation act, double scale, bool skip) {
  MlpSpec s;
  s.layer_dims = std::move(dims);
  s.output_activation = act;
  s.output_scale = scale;
  s.use_skip = skip;
  return s;
}

TEST(HexDoubleTest, RoundTripsBitForBit) {
  for (double v : {0.0, -0.0, 1.0, -2.5, 0.1, 1e-310, 1.7976931348623157e308,
                   std::nextafter(1.0, 2.0)}) {
    const double back = ParseHexDouble(HexDouble(v));
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v) << HexDouble(v);
  }
  EXPECT_THROW(ParseHexDouble("not a number"), ConfigError);
}

TEST(MlpTextTest, RoundTripIsExact) {
  for (bool skip : {false, true}) {
    const Mlp a = Mlp::Init(Spec({5, 7, 6, 2}, OutputActivation::kScaledSigmoid, 5.0, skip), 3);
    const std::string text = MlpToText(a);
    const Mlp b = MlpFromText(text);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(MlpToText(b), text);
    EXPECT_NE(text.find("\"layer_dims\""), std::string::npos);
    EXPECT_NE(text.find("relu"), std::string::npos);
  }
}

TEST(MlpTextTest, RejectsMalformedDocuments) {
  EXPECT_THROW(MlpFromText("{"), ConfigError);
  EXPECT_THROW(MlpFromText("{\"format\": \"something-else\"}"), ConfigError);
  const Mlp a = Mlp::Init(Spec({2, 3, 1}, OutputActivation::kIdentity, 1.0, false), 1);
  std::string text = MlpToText(a);
  const auto pos = text.find("\"layer_dims\": [");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 16, "\"layer_dims\": [9, ");
  EXPECT_THROW(MlpFromText(text), std::exception);
}

TEST(AgentCheckpointTest, SaveLoad) {
  const auto dir = testing::TempDir();
  AgentCheckpoint ckpt{2,
                       Mlp::Init(Spec({8, 4, 4, 1}, OutputActivation::kScaledSigmoid, 5.0, false), 1),
                       Mlp::Init(Spec({10, 4, 4, 1}, OutputActivation::kIdentity, 1.0, true), 2)};
  const std::string path = (dir / "agent_2.json").string();
  SaveAgentCheckpoint(path, ckpt);
  const AgentCheckpoint back = LoadAgentCheckpoint(path);
  EXPECT_EQ(back.agent_index, 2);
  EXPECT_TRUE(back.actor == ckpt.actor);
  EXPECT_TRUE(back.critic == ckpt.critic);
  EXPECT_TRUE(LoadActor(path) == ckpt.actor);
  EXPECT_THROW(LoadAgentCheckpoint((dir / "missing.json").string()), IoError);
  EXPECT_THROW(SaveAgentCheckpoint((dir / "no" / "such" / "dir" / "x.json").string(), ckpt),
               IoError);
}

}  // namespace
}  // namespace crowdmarl
