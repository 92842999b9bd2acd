// Copyright 2026 The ORL Authors.
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

#ifndef ORL_RNG_H_
#define ORL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace orl {

// Mixes two 64-bit values into a well-distributed seed (splitmix64 finalizer).
uint64_t mix_seed(uint64_t a, uint64_t b);

// Seeded random stream. The engine is fully specified by the standard and the
// distributions below are computed from raw bits, so draws are identical on
// every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Independent stream for a path below a root seed, e.g. (root, step, slot).
  static Rng derive(uint64_t root, std::initializer_list<uint64_t> path);

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  // Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // exp(Uniform[log lo, log hi]).
  double log_uniform(double lo, double hi);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n). n must be positive.
  uint64_t index(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace orl

#endif  // ORL_RNG_H_
