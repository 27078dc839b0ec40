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

#ifndef CROWDMARL_CHECKPOINT_H_
#define CROWDMARL_CHECKPOINT_H_

#include <string>

#include "crowdmarl/tensor_nn.h"

namespace crowdmarl {

// Checkpoints are JSON documents. Every parameter array appears twice: as
// decimal numbers for people, and as C99 hexadecimal floats ("0x1.8p+1")
// which the loader reads back bit for bit.
//
//   {
//     "format": "crowdmarl-mlp/1",
//     "layer_dims": [48, 64, 64, 1],
//     "hidden_activation": "relu",
//     "output_activation": "identity" | "scaled_sigmoid",
//     "output_scale": 5.0, "output_scale_hex": "0x1.4p+2",
//     "use_skip": true,
//     "layers": [{"rows": 64, "cols": 48,
//                 "weight": [...], "weight_hex": [...],   // row-major
//                 "bias": [...], "bias_hex": [...]}, ...]
//   }
std::string MlpToText(const Mlp& mlp);
Mlp MlpFromText(const std::string& text);

std::string HexDouble(double v);
double ParseHexDouble(const std::string& text);

// One file per agent: {"format": "crowdmarl-agent/1", "agent": i,
// "actor": <mlp>, "critic": <mlp>}.
struct AgentCheckpoint {
  int agent_index;
  Mlp actor;
  Mlp critic;
};

void SaveAgentCheckpoint(const std::string& path, const AgentCheckpoint& ckpt);
AgentCheckpoint LoadAgentCheckpoint(const std::string& path);
// Loads only the actor; what decentralized execution needs.
Mlp LoadActor(const std::string& path);

}  // namespace crowdmarl

#endif  // CROWDMARL_CHECKPOINT_H_
