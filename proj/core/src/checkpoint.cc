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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crowdmarl/errors.h"

namespace crowdmarl {
namespace {

using nlohmann::json;

constexpr char kMlpFormat[] = "crowdmarl-mlp/1";
constexpr char kAgentFormat[] = "crowdmarl-agent/1";

json MlpToJson(const Mlp& mlp) {
  const MlpSpec& spec = mlp.spec();
  json j;
  j["format"] = kMlpFormat;
  j["layer_dims"] = spec.layer_dims;
  j["hidden_activation"] = "relu";
  j["output_activation"] =
      spec.output_activation == OutputActivation::kIdentity ? "identity"
                                                            : "scaled_sigmoid";
  j["output_scale"] = spec.output_scale;
  j["output_scale_hex"] = HexDouble(spec.output_scale);
  j["use_skip"] = spec.use_skip;
  json layers = json::array();
  for (const DenseLayer& layer : mlp.layers()) {
    json l;
    l["rows"] = layer.weight.rows();
    l["cols"] = layer.weight.cols();
    json w = json::array();
    json w_hex = json::array();
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        w.push_back(layer.weight(r, c));
        w_hex.push_back(HexDouble(layer.weight(r, c)));
      }
    }
    json b = json::array();
    json b_hex = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      b.push_back(layer.bias[r]);
      b_hex.push_back(HexDouble(layer.bias[r]));
    }
    l["weight"] = std::move(w);
    l["weight_hex"] = std::move(w_hex);
    l["bias"] = std::move(b);
    l["bias_hex"] = std::move(b_hex);
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp MlpFromJson(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kMlpFormat) {
      throw ConfigError("checkpoint: unsupported mlp format");
    }
    if (j.at("hidden_activation").get<std::string>() != "relu") {
      throw ConfigError("checkpoint: unsupported hidden activation");
    }
    MlpSpec spec;
    spec.layer_dims = j.at("layer_dims").get<std::vector<int>>();
    const std::string out = j.at("output_activation").get<std::string>();
    if (out == "identity") {
      spec.output_activation = OutputActivation::kIdentity;
    } else if (out == "scaled_sigmoid") {
      spec.output_activation = OutputActivation::kScaledSigmoid;
    } else {
      throw ConfigError("checkpoint: unknown output activation '" + out + "'");
    }
    spec.output_scale = ParseHexDouble(j.at("output_scale_hex").get<std::string>());
    spec.use_skip = j.at("use_skip").get<bool>();
    Mlp mlp(spec);
    const json& layers = j.at("layers");
    if (layers.size() != mlp.num_layers()) {
      throw ShapeError("checkpoint: layer count does not match layer_dims");
    }
    for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
      DenseLayer& layer = mlp.mutable_layers()[l];
      const json& src = layers[l];
      const auto w = src.at("weight_hex").get<std::vector<std::string>>();
      const auto b = src.at("bias_hex").get<std::vector<std::string>>();
      if (src.at("rows").get<Eigen::Index>() != layer.weight.rows() ||
          src.at("cols").get<Eigen::Index>() != layer.weight.cols() ||
          static_cast<Eigen::Index>(w.size()) != layer.weight.size() ||
          static_cast<Eigen::Index>(b.size()) != layer.bias.size()) {
        throw ShapeError("checkpoint: layer " + std::to_string(l) +
                         " has the wrong shape");
      }
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
          layer.weight(r, c) = ParseHexDouble(w[k++]);
        }
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
        layer.bias[r] = ParseHexDouble(b[r]);
      }
    }
    return mlp;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace

std::string HexDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double ParseHexDouble(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ConfigError("checkpoint: malformed number '" + text + "'");
  }
  return v;
}

std::string MlpToText(const Mlp& mlp) { return MlpToJson(mlp).dump(2) + "\n"; }

Mlp MlpFromText(const std::string& text) {
  try {
    return MlpFromJson(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void SaveAgentCheckpoint(const std::string& path, const AgentCheckpoint& ckpt) {
  json j;
  j["format"] = kAgentFormat;
  j["agent"] = ckpt.agent_index;
  j["actor"] = MlpToJson(ckpt.actor);
  j["critic"] = MlpToJson(ckpt.critic);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

AgentCheckpoint LoadAgentCheckpoint(const std::string& path) {
  const json j = ReadJsonFile(path);
  try {
    if (j.at("format").get<std::string>() != kAgentFormat) {
      throw ConfigError("checkpoint '" + path + "': unsupported format");
    }
    return AgentCheckpoint{j.at("agent").get<int>(), MlpFromJson(j.at("actor")),
                           MlpFromJson(j.at("critic"))};
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint '" + path + "': " + e.what());
  }
}

Mlp LoadActor(const std::string& path) {
  const json j = ReadJsonFile(path);
  try {
    return MlpFromJson(j.at("actor"));
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace crowdmarl
