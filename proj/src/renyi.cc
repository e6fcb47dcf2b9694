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

#include "pai/renyi.h"

#include <cmath>
#include <string>

namespace pai {
namespace {

void RequireFinite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

// Absorbs accumulated rounding in long schedules; anything worse is a real
// infeasibility.
constexpr double kShiftSlack = 1e-9;

}  // namespace

RenyiOrder::RenyiOrder(double a) : alpha(a) {
  RequireFinite(a, "alpha");
  if (a <= 1.0) {
    throw std::invalid_argument("RenyiOrder: alpha must be a finite real > 1");
  }
}

RenyiBound::RenyiBound(RenyiOrder o, double eps) : order(o), epsilon(eps) {
  RequireFinite(eps, "epsilon");
  if (eps < 0.0) throw std::invalid_argument("RenyiBound: epsilon must be >= 0");
}

DpParams::DpParams(double eps, double del) : epsilon(eps), delta(del) {
  RequireFinite(eps, "epsilon");
  if (eps < 0.0) throw std::invalid_argument("DpParams: epsilon must be >= 0");
  if (!(del > 0.0 && del < 1.0)) {
    throw std::invalid_argument("DpParams: delta must lie in (0,1)");
  }
}

GaussianNoise::GaussianNoise(double sigma, int dim) : sigma_(sigma), dim_(dim) {
  RequireFinite(sigma, "sigma");
  if (sigma <= 0.0) throw std::invalid_argument("GaussianNoise: sigma must be > 0");
  if (dim < 1) throw std::invalid_argument("GaussianNoise: dim must be >= 1");
}

double GaussianNoise::ShiftCost(double displacement, RenyiOrder order) const {
  return GaussianRenyi(*this, displacement, order);
}

ShiftedBudget::ShiftedBudget(double z, double eps, RenyiOrder o)
    : shift_z(z), epsilon(eps), order(o) {
  RequireFinite(z, "shift_z");
  RequireFinite(eps, "epsilon");
  if (z < 0.0) throw std::invalid_argument("ShiftedBudget: shift_z must be >= 0");
  if (eps < 0.0) throw std::invalid_argument("ShiftedBudget: epsilon must be >= 0");
}

double GaussianRenyi(const GaussianNoise& noise, double displacement, RenyiOrder order) {
  RequireFinite(displacement, "displacement");
  if (displacement < 0.0) {
    throw std::invalid_argument("GaussianRenyi: displacement must be >= 0");
  }
  const double sigma = noise.sigma();
  return order.alpha * displacement * displacement / (2.0 * sigma * sigma);
}

DpParams RdpToDp(const RenyiBound& bound, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("RdpToDp: delta must lie in (0,1)");
  }
  return DpParams(bound.epsilon + std::log(1.0 / delta) / (bound.order.alpha - 1.0), delta);
}

RenyiBound ComposeRdp(RenyiOrder order, std::span<const RenyiBound> bounds) {
  double total = 0.0;
  for (const RenyiBound& b : bounds) {
    if (b.order.alpha != order.alpha) {
      throw std::invalid_argument("ComposeRdp: bounds must share a common order");
    }
    total += b.epsilon;
  }
  return RenyiBound(order, total);
}

ShiftedBudget ShiftReductionStep(const ShiftedBudget& budget, double allowance,
                                 const NoiseModel& noise) {
  RequireFinite(allowance, "allowance");
  if (allowance < 0.0) {
    throw std::invalid_argument("ShiftReductionStep: allowance must be >= 0");
  }
  double z = budget.shift_z - allowance;
  if (z < 0.0) {
    if (z < -kShiftSlack * std::max(1.0, budget.shift_z)) {
      throw FeasibilityError(
          "ShiftReductionStep: allowance exceeds the remaining shift budget "
          "(schedule infeasible; shifts must stay nonnegative)");
    }
    z = 0.0;
  }
  return ShiftedBudget(z, budget.epsilon + noise.ShiftCost(allowance, budget.order),
                       budget.order);
}

ShiftedBudget ContractionStep(const ShiftedBudget& budget, double map_discrepancy) {
  RequireFinite(map_discrepancy, "map_discrepancy");
  if (map_discrepancy < 0.0) {
    throw std::invalid_argument("ContractionStep: map discrepancy must be >= 0");
  }
  return ShiftedBudget(budget.shift_z + map_discrepancy, budget.epsilon, budget.order);
}

double ShiftedGaussianUpper(double mean_gap, double shift_z, double sigma, RenyiOrder order) {
  RequireFinite(mean_gap, "mean_gap");
  RequireFinite(shift_z, "shift_z");
  RequireFinite(sigma, "sigma");
  if (mean_gap < 0.0 || shift_z < 0.0) {
    throw std::invalid_argument("ShiftedGaussianUpper: gap and shift must be >= 0");
  }
  if (sigma <= 0.0) throw std::invalid_argument("ShiftedGaussianUpper: sigma must be > 0");
  const double residual = std::max(mean_gap - shift_z, 0.0);
  return order.alpha * residual * residual / (2.0 * sigma * sigma);
}

}  // namespace pai
