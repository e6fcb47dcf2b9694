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
// Closed-form privacy accountants for projected noisy SGD and its variants,
// built on the shifted-divergence budget calculus. Every closed form here is
// double-entry checked: the accountant recomputes the bound through the
// schedule fold (PaiBound) and asserts agreement to 1e-12 relative.

#ifndef PAI_ACCOUNTANT_H_
#define PAI_ACCOUNTANT_H_

#include <functional>
#include <span>
#include <vector>

#include "pai/renyi.h"

namespace pai {

// Parameters of a noisy-SGD run that the accountants consume. sigma is the
// gradient-space noise scale (the per-step iterate noise is eta * sigma).
// Construction rejects eta > 2/smoothness: gradient steps stop being
// contractive there and every amplification bound below assumes they are.
struct SgdPrivacyConfig {
  int n;
  double lipschitz;
  double sigma;
  double eta;
  double smoothness;
  SgdPrivacyConfig(int n, double lipschitz, double sigma, double eta, double smoothness);
};

// Per-step map discrepancies s_t and shift allowances a_t. Feasible when
// every prefix shift z_t = sum(s_1..s_t) - sum(a_1..a_t) is nonnegative.
struct ShiftSchedule {
  std::vector<double> s;
  std::vector<double> a;
  ShiftSchedule(std::vector<double> s, std::vector<double> a);
  int steps() const { return static_cast<int>(s.size()); }
  // z_T, the shift left after the last step.
  double FinalShift() const;
};

// Folds the budget calculus over the schedule and returns the terminal
// shifted budget (whatever z_T is).
ShiftedBudget PaiShiftedBudget(const ShiftSchedule& schedule, std::span<const double> sigmas,
                               RenyiOrder order);

// Same fold, but requires z_T == 0 so the result is a plain divergence
// bound: epsilon = sum_t alpha * a_t^2 / (2 sigma_t^2). Throws
// FeasibilityError when the schedule leaves a residual shift.
RenyiBound PaiBound(const ShiftSchedule& schedule, std::span<const double> sigmas,
                    RenyiOrder order);

// Per-index RDP of one-pass PNSGD: epsilon_t = 2 alpha L^2 / (sigma^2 (n+1-t)).
// index_t is 1-based; earlier indices get more amplification.
RenyiBound PerIndexPnsgdRdp(const SgdPrivacyConfig& cfg, int index_t, RenyiOrder order);

// Skip-PNSGD satisfies the same stated per-index bound (skipping only
// improves on it; the sharper guarantee is not available in closed form).
RenyiBound SkipPnsgdRdp(const SgdPrivacyConfig& cfg, int index_t, RenyiOrder order);

// Random-stop PNSGD: uniform over all indices,
// epsilon = 4 alpha L^2 ln(n) / (n sigma^2), valid only under the
// weak-convexity hypothesis sigma >= L sqrt(2 (alpha-1) alpha) (hard
// precondition, never a silent fallback).
RenyiBound StopPnsgdRdp(const SgdPrivacyConfig& cfg, RenyiOrder order);

// The stop formula itself with a real-valued n, for formula-level checks.
double StopPnsgdEpsilon(double n, double lipschitz, double sigma, double alpha);

// sigma threshold of the stop accountant's hypothesis.
double StopPnsgdSigmaThreshold(double lipschitz, double alpha);

// Divergence of a mixture: if every component divergence is at most
// c/(alpha-1) for some c in (0,1], the mixture under weights rho is bounded
// by (1+c) * sum_i rho_i * D_i. Components above the cap are rejected.
double MixtureDivergenceBound(std::span<const double> per_component,
                              std::span<const double> weights, double c, RenyiOrder order);

// Multiple-epoch PNSGD (n passes in fixed order, n^2 steps). Returns the
// exact schedule sum 2 alpha L^2/sigma^2 * ((n-1)/n + 1/(n-i+1)) maximized
// over the differing index i, which is strictly below the stated
// 4 alpha L^2 / sigma^2; the tighter value is reported.
RenyiBound MultiepochPnmsgdRdp(const SgdPrivacyConfig& cfg, RenyiOrder order);

// The exact multiple-epoch sum for one differing index i (1-based).
double MultiepochExactSum(int n, int i, double lipschitz, double sigma, double alpha);

// Local RDP of a single noisy gradient release: 2 alpha L^2 / sigma^2.
// Holds without any smoothness assumption.
RenyiBound LocalRdp(const SgdPrivacyConfig& cfg, RenyiOrder order);

struct MultitaskParams {
  double sigma;
  double eta;
  double per_task_alpha;
  double q;
  DpParams certified;  // composed RDP converted at delta; <= requested epsilon
};

// Parameter selection for answering k convex tasks on one dataset with
// random-stop runs: q = max(2 k ln n / n, 2 ln(1/delta)),
// sigma = 4 L sqrt(q ln(1/delta)) / epsilon, eta = 4R/sqrt(n(L^2 + d sigma^2)),
// alpha = 4 ln(1/delta)/epsilon. Verifies the whole inequality chain
// numerically (sigma above the stop threshold; composed RDP + conversion
// lands at or below epsilon) and throws if any link fails.
MultitaskParams MultitaskDp(int n, int k, double lipschitz, double radius, int dim,
                            double epsilon, double delta);

// Default order grid for conversions: 200 log-spaced orders with alpha - 1
// spanning [2^-8, 2^10 - 1].
std::vector<double> DefaultAlphaGrid();

// Minimizes RdpToDp(curve(alpha), delta) over the grid.
DpParams TightestDp(const std::function<double(double)>& rdp_curve, double delta,
                    std::span<const double> alpha_grid);

}  // namespace pai

#endif  // PAI_ACCOUNTANT_H_
