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

#include "pai/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pai {
namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t Chain(uint64_t key, uint64_t word) {
  return Mix64(key + kGolden + Mix64(word + kGolden));
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, Stream stream, uint64_t a, uint64_t b) {
  key_ = Chain(Chain(Chain(Mix64(seed + kGolden), static_cast<uint64_t>(stream)), a), b);
}

uint64_t CounterRng::NextRaw() { return Mix64(key_ + kGolden * ++counter_); }

double CounterRng::NextUniform() {
  // 53 random bits in [0,1), flipped to (0,1] so log() below is safe.
  return 1.0 - static_cast<double>(NextRaw() >> 11) * 0x1.0p-53;
}

double CounterRng::NextGaussian() {
  ++gaussian_draws_;
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = NextUniform();
  const double u2 = NextUniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

uint64_t CounterRng::NextBelow(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("CounterRng::NextBelow: bound must be >= 1");
  ++index_draws_;
  if (bound == 1) return 0;
  const uint64_t threshold = (-bound) % bound;  // 2^64 mod bound
  while (true) {
    const uint64_t r = NextRaw();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace pai
