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

#include "crowdmarl/errors.h"

#include <utility>

namespace crowdmarl {
namespace {

std::string JoinViolations(const std::vector<std::string>& violations) {
  std::string message = "invalid configuration";
  for (const std::string& v : violations) {
    message += "\n  - ";
    message += v;
  }
  return message;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(JoinViolations(violations)),
      violations_(std::move(violations)) {}

ConfigError::ConfigError(const std::string& message)
    : std::runtime_error(message), violations_({message}) {}

}  // namespace crowdmarl
