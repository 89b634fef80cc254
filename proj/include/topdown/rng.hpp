// Copyright 2026 The Topdown Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace topdown {

/// Seeded random source used by every stochastic component.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distribution code is written here rather than using the
/// <random> distributions, whose algorithms are implementation-defined, so
/// draws are identical across standard libraries.
///
/// Independent streams are derived with `Rng::substream(seed, purpose, index)`:
/// the purpose string is hashed (FNV-1a 64) and mixed with the seed and index
/// through SplitMix64 finalizers. Adding a new purpose never perturbs the
/// draws of an existing one.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform integer in [0, n), rejection-sampled.
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace topdown
