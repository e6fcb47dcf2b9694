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
// Closed-form Renyi-divergence quantities for Gaussian noise, RDP <-> DP
// conversions, RDP composition, and the shifted-divergence budget calculus.
//
// Unit conventions used throughout the library: divergence bounds (epsilon)
// are in nats; shifts and displacements are in l2 norm units of the
// parameter space.

#ifndef PAI_RENYI_H_
#define PAI_RENYI_H_

#include <span>
#include <stdexcept>
#include <vector>

namespace pai {

// Raised when a shift schedule would drive a shift budget negative.
class FeasibilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Renyi order alpha, restricted to finite orders strictly above 1. Orders 1
// and infinity are defined by continuity and are out of scope here; the
// accountants only need finite alpha > 1.
struct RenyiOrder {
  double alpha;
  explicit RenyiOrder(double a);
};

// An (alpha, epsilon) RDP guarantee: divergence at order alpha bounded by
// epsilon nats.
struct RenyiBound {
  RenyiOrder order;
  double epsilon;
  RenyiBound(RenyiOrder o, double eps);
};

struct DpParams {
  double epsilon;
  double delta;
  DpParams(double eps, double del);
};

// Noise magnitude seam: the cost of hiding a displacement of length at most
// `displacement` at order alpha. Only the Gaussian instance ships, but the
// budget calculus below is noise-generic.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  virtual double ShiftCost(double displacement, RenyiOrder order) const = 0;
};

// Spherical Gaussian noise with per-coordinate standard deviation sigma.
// Its shift cost is alpha * a^2 / (2 sigma^2), independent of dimension.
class GaussianNoise final : public NoiseModel {
 public:
  explicit GaussianNoise(double sigma, int dim = 1);
  double ShiftCost(double displacement, RenyiOrder order) const override;
  double sigma() const { return sigma_; }
  int dim() const { return dim_; }

 private:
  double sigma_;
  int dim_;
};

// A divergence bound that still carries an unresolved shift: epsilon nats at
// order alpha, up to a residual W-infinity shift of shift_z norm units.
struct ShiftedBudget {
  double shift_z;
  double epsilon;
  RenyiOrder order;
  ShiftedBudget(double z, double eps, RenyiOrder o);
};

// alpha * a^2 / (2 sigma^2): the order-alpha divergence between the noise
// distribution and its copy shifted by a vector of length a.
double GaussianRenyi(const GaussianNoise& noise, double displacement, RenyiOrder order);

// (alpha, eps)-RDP implies (eps + ln(1/delta)/(alpha-1), delta)-DP.
DpParams RdpToDp(const RenyiBound& bound, double delta);

// Sum of epsilons at a common order. All bounds must match `order`.
RenyiBound ComposeRdp(RenyiOrder order, std::span<const RenyiBound> bounds);

// One noise-addition step of the budget calculus: spend allowance a of the
// shift (z must stay nonnegative, otherwise FeasibilityError) and pay the
// noise's shift cost in epsilon. Signals infeasibility rather than clamping.
ShiftedBudget ShiftReductionStep(const ShiftedBudget& budget, double allowance,
                                 const NoiseModel& noise);

// One contractive-map step: maps whose pointwise discrepancy is at most s
// grow the shift by s and leave epsilon unchanged.
ShiftedBudget ContractionStep(const ShiftedBudget& budget, double map_discrepancy);

// Translation-coupling upper bound on the z-shifted divergence between
// N(gap, sigma^2) and N(0, sigma^2): alpha * max(gap - z, 0)^2 / (2 sigma^2).
// Strictly an upper bound; no tightness is claimed.
double ShiftedGaussianUpper(double mean_gap, double shift_z, double sigma, RenyiOrder order);

}  // namespace pai

#endif  // PAI_RENYI_H_
