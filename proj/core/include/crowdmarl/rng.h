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

#ifndef CROWDMARL_RNG_H_
#define CROWDMARL_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace crowdmarl {

// Mixes a master seed with a stream id (SplitMix64 finalizer). Used to hand
// every run, episode and agent its own independent stream.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream);

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions below are written out here
// because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Unbiased index in [0, n). n must be positive.
  std::size_t UniformIndex(std::size_t n);
  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace crowdmarl

#endif  // CROWDMARL_RNG_H_
