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
//
// Projected noisy SGD and its variants, run as contractive noisy iterations:
// each step takes one gradient step on one example, adds fresh Gaussian
// noise to the gradient, and projects back onto the feasible set. Data order
// is exactly the given sequence; nothing is shuffled.

#ifndef PAI_SGD_H_
#define PAI_SGD_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pai/convex.h"
#include "pai/loss.h"
#include "pai/rng.h"

namespace pai {

struct SgdRunConfig {
  double eta = 0.0;
  double sigma = 0.0;  // gradient-space noise scale; iterate noise is eta*sigma
  Vector w0;           // projected onto the set at run start if outside
  uint64_t seed = 0;
  // Debug-mode per-step feasibility assertion (every iterate must be in K).
  bool check_feasibility = false;
  // Optional per-step observer (step index, post-projection iterate).
  std::function<void(int, const Vector&)> observer;
};

struct SgdResult {
  Vector w;
  int steps = 0;
  int skip_t0 = -1;  // Skip variant only
  int stop_T = -1;   // Stop variant only
  // False when eta > 2/smoothness (or the loss is non-smooth): the run is
  // legal but gradient steps are not contractive, so no amplification claim
  // applies to it.
  bool amplification_valid = false;
  // RNG-budget audit counters.
  uint64_t gaussian_draws = 0;
  uint64_t index_draws = 0;
  uint64_t smoothing_draws = 0;
};

// One pass over data; returns w_n after exactly n updates. The update is
//   v = w - eta * (grad + sigma * z),  w = Project(v),  z ~ N(0, I_d),
// with the step-t noise taken from substream (seed, kNoise, t). Deterministic
// given the seed.
SgdResult Pnsgd(std::span<const Example> data, const LossFamily& loss, const ConvexSet& set,
                const SgdRunConfig& cfg);

// Draws t0 uniformly from {0, ..., floor(n/2)} and runs Pnsgd on the suffix
// data[t0..].
SgdResult SkipPnsgd(std::span<const Example> data, const LossFamily& loss,
                    const ConvexSet& set, const SgdRunConfig& cfg);

// Draws T uniformly from {1, ..., n}, makes T steps, outputs w_T.
SgdResult StopPnsgd(std::span<const Example> data, const LossFamily& loss,
                    const ConvexSet& set, const SgdRunConfig& cfg);

// n epochs over the n examples in fixed order (n^2 updates).
SgdResult Pnmsgd(std::span<const Example> data, const LossFamily& loss, const ConvexSet& set,
                 const SgdRunConfig& cfg);

struct ContractivityViolation {
  int trial;
  double expansion;  // ||psi(w)-psi(w')|| - ||w-w'||
  double ratio;
};

struct ContractivityReport {
  int trials = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max over trials of ||psi(w)-psi(w')||/||w-w'||
  std::vector<ContractivityViolation> cases;
  bool ok() const { return violations == 0; }
};

// Samples random pairs (w, w') in a box around the origin and examples from
// `examples`, and checks the gradient-step map psi(w) = w - eta grad f(w, x)
// for expansion beyond 1e-10 slack. Violations are reported, not thrown.
ContractivityReport CheckContractivity(const LossFamily& loss,
                                       std::span<const Example> examples, double eta,
                                       int trials, CounterRng& rng, double sample_radius = 1.0);

// Dataset files. CSV: one example per row, d feature columns then the label.
// Binary: 16-byte header (magic "CNI1", uint32 d, uint64 n, little-endian)
// followed by n*(d+1) little-endian float64 values, features then label per
// example.
std::vector<Example> LoadExamplesCsv(const std::string& path);
void SaveExamplesCsv(std::span<const Example> data, const std::string& path);
std::vector<Example> LoadExamplesBinary(const std::string& path);
void SaveExamplesBinary(std::span<const Example> data, const std::string& path);

}  // namespace pai

#endif  // PAI_SGD_H_
