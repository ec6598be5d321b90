// Copyright 2026 The advgrasp Authors
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

#ifndef ADVGRASP_RNG_H_
#define ADVGRASP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace advgrasp {

// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t Mix64(std::uint64_t x);

// Derives an independent stream seed from a root seed and a path of tags.
// Every seeded operation in the library goes through this so that results
// depend only on explicit seeds, never on call order.
std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> path);

// Thin wrapper over mt19937_64 with distribution code that is identical on
// every standard library (std:: distributions are implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(Mix64(seed)) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  int UniformInt(int lo, int hi_inclusive) {
    return lo + static_cast<int>(
                    Below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace advgrasp

#endif  // ADVGRASP_RNG_H_
