// Copyright 2026 The pai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAI_RNG_H_
#define PAI_RNG_H_

#include <cstdint>

namespace pai {

// Stream labels so that independent consumers of the same run seed never
// share a substream.
enum class Stream : uint64_t {
  kNoise = 1,      // per-step privacy noise
  kIndex = 2,      // skip/stop index draws
  kData = 3,       // synthetic dataset generation
  kSmoothing = 4,  // smoothing kernel draws
  kTest = 5,       // test-local sampling
};

// Counter-based generator: every output is a pure function of
// (seed, stream, a, b, counter), so substreams replay identically no matter
// how runs are scheduled across threads. Mixing is SplitMix64-style.
class CounterRng {
 public:
  CounterRng(uint64_t seed, Stream stream, uint64_t a = 0, uint64_t b = 0);

  // Uniform in (0, 1].
  double NextUniform();
  // Standard normal via Box-Muller; the second value of each pair is cached.
  double NextGaussian();
  // Unbiased uniform integer in [0, bound), bound >= 1, via rejection.
  uint64_t NextBelow(uint64_t bound);

  uint64_t NextRaw();

  // Draw counters for RNG-budget audits (counts values handed out).
  uint64_t gaussian_draws() const { return gaussian_draws_; }
  uint64_t index_draws() const { return index_draws_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
  uint64_t gaussian_draws_ = 0;
  uint64_t index_draws_ = 0;
};

}  // namespace pai

#endif  // PAI_RNG_H_
