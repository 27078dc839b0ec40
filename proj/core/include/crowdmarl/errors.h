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

#ifndef CROWDMARL_ERRORS_H_
#define CROWDMARL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace crowdmarl {

// Invalid configuration. Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  ConfigError(const std::string& message);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Vector or matrix dimensions do not agree with what an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition on an argument's value was broken.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EpisodeCompleteError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EmptyBufferError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// File-system failure; the message always names the path involved.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crowdmarl

#endif  // CROWDMARL_ERRORS_H_
