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

#include "pai/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace pai {
namespace {

// 1e-12 relative, widened for long schedules where plain left-to-right
// summation alone can accumulate ~steps * ulp of drift.
void CheckDoubleEntry(double closed_form, double schedule_value, long steps,
                      const char* what) {
  const double tol = std::max(1e-12, static_cast<double>(steps) * 2.5e-16);
  const double scale = std::max({std::fabs(closed_form), std::fabs(schedule_value), 1e-300});
  if (std::fabs(closed_form - schedule_value) > tol * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": closed form " << closed_form << " disagrees with schedule value "
        << schedule_value;
    throw std::logic_error(msg.str());
  }
}

}  // namespace

SgdPrivacyConfig::SgdPrivacyConfig(int n_in, double lipschitz_in, double sigma_in,
                                   double eta_in, double smoothness_in)
    : n(n_in), lipschitz(lipschitz_in), sigma(sigma_in), eta(eta_in),
      smoothness(smoothness_in) {
  if (n < 1) throw std::invalid_argument("SgdPrivacyConfig: n must be >= 1");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw std::invalid_argument("SgdPrivacyConfig: lipschitz constant must be > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("SgdPrivacyConfig: sigma must be > 0");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("SgdPrivacyConfig: eta must be > 0");
  }
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
    throw std::invalid_argument("SgdPrivacyConfig: smoothness must be > 0");
  }
  if (eta > 2.0 / smoothness) {
    throw std::invalid_argument(
        "SgdPrivacyConfig: eta must satisfy eta <= 2/smoothness; gradient steps "
        "are not contractive beyond that and no amplification bound applies");
  }
}

ShiftSchedule::ShiftSchedule(std::vector<double> s_in, std::vector<double> a_in)
    : s(std::move(s_in)), a(std::move(a_in)) {
  if (s.size() != a.size()) {
    throw std::invalid_argument("ShiftSchedule: s and a must have the same length");
  }
  for (double v : s) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("ShiftSchedule: discrepancies must be finite and >= 0");
    }
  }
  for (double v : a) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("ShiftSchedule: allowances must be finite and >= 0");
    }
  }
}

double ShiftSchedule::FinalShift() const {
  double z = 0.0;
  for (size_t i = 0; i < s.size(); ++i) z += s[i] - a[i];
  return z;
}

ShiftedBudget PaiShiftedBudget(const ShiftSchedule& schedule, std::span<const double> sigmas,
                               RenyiOrder order) {
  if (static_cast<int>(sigmas.size()) != schedule.steps()) {
    throw std::invalid_argument("PaiShiftedBudget: sigmas length must match the schedule");
  }
  ShiftedBudget budget(0.0, 0.0, order);
  for (int t = 0; t < schedule.steps(); ++t) {
    budget = ContractionStep(budget, schedule.s[t]);
    budget = ShiftReductionStep(budget, schedule.a[t], GaussianNoise(sigmas[t]));
  }
  return budget;
}

RenyiBound PaiBound(const ShiftSchedule& schedule, std::span<const double> sigmas,
                    RenyiOrder order) {
  const ShiftedBudget budget = PaiShiftedBudget(schedule, sigmas, order);
  double total_shift = 0.0;
  for (double v : schedule.s) total_shift += v;
  if (budget.shift_z > 1e-9 * std::max(1.0, total_shift)) {
    throw FeasibilityError(
        "PaiBound: schedule leaves a residual shift (z_T != 0); only a shifted "
        "budget is valid, use PaiShiftedBudget");
  }
  return RenyiBound(order, budget.epsilon);
}

namespace {

// The schedule used in the one-pass per-index analysis: the differing index
// contributes discrepancy 2 eta L at step t, amortized uniformly over the
// remaining n - t + 1 noise additions.
ShiftSchedule PerIndexSchedule(const SgdPrivacyConfig& cfg, int index_t) {
  std::vector<double> s(cfg.n, 0.0);
  std::vector<double> a(cfg.n, 0.0);
  const double drift = 2.0 * cfg.eta * cfg.lipschitz;
  s[index_t - 1] = drift;
  const int remaining = cfg.n - index_t + 1;
  for (int i = index_t - 1; i < cfg.n; ++i) a[i] = drift / remaining;
  return ShiftSchedule(std::move(s), std::move(a));
}

}  // namespace

RenyiBound PerIndexPnsgdRdp(const SgdPrivacyConfig& cfg, int index_t, RenyiOrder order) {
  if (index_t < 1 || index_t > cfg.n) {
    throw std::invalid_argument("PerIndexPnsgdRdp: index must lie in 1..n");
  }
  const double closed_form = 2.0 * order.alpha * cfg.lipschitz * cfg.lipschitz /
                             (cfg.sigma * cfg.sigma * (cfg.n + 1 - index_t));
  const std::vector<double> sigmas(cfg.n, cfg.eta * cfg.sigma);
  const RenyiBound schedule_bound = PaiBound(PerIndexSchedule(cfg, index_t), sigmas, order);
  CheckDoubleEntry(closed_form, schedule_bound.epsilon, cfg.n, "PerIndexPnsgdRdp");
  return RenyiBound(order, closed_form);
}

RenyiBound SkipPnsgdRdp(const SgdPrivacyConfig& cfg, int index_t, RenyiOrder order) {
  return PerIndexPnsgdRdp(cfg, index_t, order);
}

double StopPnsgdSigmaThreshold(double lipschitz, double alpha) {
  return lipschitz * std::sqrt(2.0 * (alpha - 1.0) * alpha);
}

double StopPnsgdEpsilon(double n, double lipschitz, double sigma, double alpha) {
  return 4.0 * alpha * lipschitz * lipschitz * std::log(n) / (n * sigma * sigma);
}

RenyiBound StopPnsgdRdp(const SgdPrivacyConfig& cfg, RenyiOrder order) {
  const double threshold = StopPnsgdSigmaThreshold(cfg.lipschitz, order.alpha);
  if (cfg.sigma < threshold) {
    std::ostringstream msg;
    msg << "StopPnsgdRdp: sigma = " << cfg.sigma << " is below L*sqrt(2(alpha-1)alpha) = "
        << threshold << "; the weak-convexity mixture argument needs per-run divergences "
        << "at most 1/(alpha-1)";
    throw std::invalid_argument(msg.str());
  }
  return RenyiBound(order, StopPnsgdEpsilon(cfg.n, cfg.lipschitz, cfg.sigma, order.alpha));
}

double MixtureDivergenceBound(std::span<const double> per_component,
                              std::span<const double> weights, double c, RenyiOrder order) {
  if (per_component.size() != weights.size()) {
    throw std::invalid_argument("MixtureDivergenceBound: component/weight length mismatch");
  }
  if (!(c > 0.0 && c <= 1.0)) {
    throw std::invalid_argument("MixtureDivergenceBound: c must lie in (0,1]");
  }
  const double cap = c / (order.alpha - 1.0);
  double mean = 0.0;
  double weight_total = 0.0;
  for (size_t i = 0; i < per_component.size(); ++i) {
    if (!(per_component[i] >= 0.0) || !std::isfinite(per_component[i])) {
      throw std::invalid_argument("MixtureDivergenceBound: components must be finite, >= 0");
    }
    if (per_component[i] > cap) {
      throw std::invalid_argument(
          "MixtureDivergenceBound: a component exceeds c/(alpha-1); the weak-convexity "
          "bound does not apply");
    }
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("MixtureDivergenceBound: weights must be >= 0");
    }
    mean += weights[i] * per_component[i];
    weight_total += weights[i];
  }
  if (std::fabs(weight_total - 1.0) > 1e-9) {
    throw std::invalid_argument("MixtureDivergenceBound: weights must sum to 1");
  }
  return (1.0 + c) * mean;
}

double MultiepochExactSum(int n, int i, double lipschitz, double sigma, double alpha) {
  const double lead = 2.0 * alpha * lipschitz * lipschitz / (sigma * sigma);
  return lead * (static_cast<double>(n - 1) / n + 1.0 / (n - i + 1));
}

namespace {

// Multiple-epoch schedule over n^2 steps for differing index i: a lump of
// 2 eta L arrives once per epoch; allowances drain 2 eta L / n per step until
// the final partial epoch, which drains 2 eta L / (n - i + 1) per step.
ShiftSchedule MultiepochSchedule(const SgdPrivacyConfig& cfg, int i) {
  const int n = cfg.n;
  const long total = static_cast<long>(n) * n;
  const double drift = 2.0 * cfg.eta * cfg.lipschitz;
  std::vector<double> s(total, 0.0);
  std::vector<double> a(total, 0.0);
  for (long t = 1; t <= total; ++t) {
    if ((t - i) % n == 0 && t >= i) s[t - 1] = drift;
    if (t < i) {
      a[t - 1] = 0.0;
    } else if (t < static_cast<long>(n) * (n - 1) + i) {
      a[t - 1] = drift / n;
    } else {
      a[t - 1] = drift / (n - i + 1);
    }
  }
  return ShiftSchedule(std::move(s), std::move(a));
}

}  // namespace

RenyiBound MultiepochPnmsgdRdp(const SgdPrivacyConfig& cfg, RenyiOrder order) {
  const double stated =
      4.0 * order.alpha * cfg.lipschitz * cfg.lipschitz / (cfg.sigma * cfg.sigma);
  double worst = 0.0;
  int worst_i = 1;
  for (int i = 1; i <= cfg.n; ++i) {
    const double v = MultiepochExactSum(cfg.n, i, cfg.lipschitz, cfg.sigma, order.alpha);
    if (v > worst) {
      worst = v;
      worst_i = i;
    }
  }
  if (!(worst < stated)) {
    throw std::logic_error("MultiepochPnmsgdRdp: exact sum failed to beat the stated bound");
  }
  // Double entry against the n^2-step schedule at the worst index. Cap the
  // schedule replay so the audit stays cheap for large n; the closed form is
  // what ships either way.
  if (static_cast<long>(cfg.n) * cfg.n <= 1 << 20) {
    const std::vector<double> sigmas(static_cast<size_t>(cfg.n) * cfg.n, cfg.eta * cfg.sigma);
    const RenyiBound schedule_bound =
        PaiBound(MultiepochSchedule(cfg, worst_i), sigmas, order);
    CheckDoubleEntry(worst, schedule_bound.epsilon,
                     static_cast<long>(cfg.n) * cfg.n, "MultiepochPnmsgdRdp");
  }
  return RenyiBound(order, worst);
}

RenyiBound LocalRdp(const SgdPrivacyConfig& cfg, RenyiOrder order) {
  return RenyiBound(order,
                    2.0 * order.alpha * cfg.lipschitz * cfg.lipschitz / (cfg.sigma * cfg.sigma));
}

MultitaskParams MultitaskDp(int n, int k, double lipschitz, double radius, int dim,
                            double epsilon, double delta) {
  if (n < 2) throw std::invalid_argument("MultitaskDp: n must be >= 2");
  if (k < 1) throw std::invalid_argument("MultitaskDp: k must be >= 1");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("MultitaskDp: lipschitz must be > 0");
  if (!(radius > 0.0)) throw std::invalid_argument("MultitaskDp: radius must be > 0");
  if (dim < 1) throw std::invalid_argument("MultitaskDp: dim must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("MultitaskDp: epsilon must lie in (0,1)");
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument("MultitaskDp: delta must lie in (0,1/2)");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  const double q = std::max(2.0 * k * std::log(static_cast<double>(n)) / n,
                            2.0 * log_inv_delta);
  const double sigma = 4.0 * lipschitz * std::sqrt(q * log_inv_delta) / epsilon;
  const double alpha = 4.0 * log_inv_delta / epsilon;
  const double eta = 4.0 * radius / std::sqrt(n * (lipschitz * lipschitz + dim * sigma * sigma));

  // Inequality chain of the multi-task argument, checked numerically. Any
  // failure means the caller's parameters are outside the guarantee's scope.
  if (!(alpha > 2.0)) {
    throw std::domain_error("MultitaskDp: derived alpha = 4 ln(1/delta)/epsilon must exceed 2");
  }
  if (sigma < StopPnsgdSigmaThreshold(lipschitz, alpha)) {
    throw std::domain_error(
        "MultitaskDp: derived sigma fails sigma >= L sqrt(2(alpha-1)alpha)");
  }
  const double per_task = StopPnsgdEpsilon(n, lipschitz, sigma, alpha);
  std::vector<RenyiBound> tasks(static_cast<size_t>(k),
                                RenyiBound(RenyiOrder(alpha), per_task));
  const RenyiBound composed = ComposeRdp(RenyiOrder(alpha), tasks);
  const DpParams certified = RdpToDp(composed, delta);
  if (certified.epsilon > epsilon) {
    throw std::domain_error(
        "MultitaskDp: composed RDP converted at delta exceeds the requested epsilon");
  }
  return MultitaskParams{sigma, eta, alpha, q, certified};
}

std::vector<double> DefaultAlphaGrid() {
  constexpr int kPoints = 200;
  const double lo = std::pow(2.0, -8);   // alpha - 1 lower end
  const double hi = std::pow(2.0, 10) - 1.0;
  std::vector<double> grid(kPoints);
  const double step = std::log(hi / lo) / (kPoints - 1);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = 1.0 + lo * std::exp(step * i);
  }
  return grid;
}

DpParams TightestDp(const std::function<double(double)>& rdp_curve, double delta,
                    std::span<const double> alpha_grid) {
  if (alpha_grid.empty()) throw std::invalid_argument("TightestDp: alpha grid is empty");
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : alpha_grid) {
    const RenyiOrder order(alpha);  // rejects alpha <= 1
    const DpParams dp = RdpToDp(RenyiBound(order, rdp_curve(alpha)), delta);
    best = std::min(best, dp.epsilon);
  }
  return DpParams(best, delta);
}

}  // namespace pai
