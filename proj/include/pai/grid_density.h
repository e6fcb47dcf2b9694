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
// Ground-truth numerical machinery in one dimension: exact propagation of a
// contractive noisy iteration by discretized pushforward + convolution, and
// quadrature evaluation of Renyi divergences on the grid.

#ifndef PAI_GRID_DENSITY_H_
#define PAI_GRID_DENSITY_H_

#include <functional>
#include <span>
#include <vector>

#include "pai/renyi.h"

namespace pai {

// A probability mass vector over m equal cells covering [lo, hi]; cell i is
// centered at lo + (i + 1/2) * delta. Mass sums to 1 within 1e-9; m >= 64.
struct GridDensity {
  double lo = 0.0;
  double hi = 0.0;
  int cells = 0;
  std::vector<double> mass;
  // Cells below this absolute mass level are numerically untrusted. Exact
  // discretizations leave it at 0; FFT-propagated densities set it to
  // 1e-9 * max mass, where convolution round-off is still two orders of
  // magnitude down in relative terms.
  double reliable_floor = 0.0;

  double Delta() const { return (hi - lo) / cells; }
  double CellCenter(int i) const { return lo + (i + 0.5) * Delta(); }
  int CellOf(double x) const;  // clamped to [0, cells)
  double Mean() const;
  double Variance() const;
  void Validate() const;

  static GridDensity PointMass(double x, double lo, double hi, int cells);
  // Cell masses are exact Gaussian cell probabilities (CDF differences),
  // renormalized over the grid.
  static GridDensity Gaussian(double mean, double sigma, double lo, double hi, int cells);
};

// 1-Lipschitz maps on the line. The gradstep kind wraps x - eta*fprime(x)
// for a piecewise-smooth fprime; contractivity of arbitrary callables is
// checked on the grid, not assumed.
class Contraction1D {
 public:
  enum class Kind { kIdentity, kClamp, kScale, kGradStep };

  static Contraction1D Identity();
  static Contraction1D Clamp(double lo, double hi);
  static Contraction1D Scale(double c);  // |c| <= 1
  static Contraction1D GradStep(double eta, std::function<double(double)> fprime);

  double Apply(double x) const;
  Kind kind() const { return kind_; }

  // Max difference quotient over adjacent grid cell centers must be at most
  // 1 + 1e-9; throws otherwise.
  void VerifyLipschitzOnGrid(const GridDensity& grid) const;

 private:
  explicit Contraction1D(Kind kind) : kind_(kind) {}
  Kind kind_;
  double clamp_lo_ = 0.0, clamp_hi_ = 0.0;
  double scale_ = 1.0;
  double eta_ = 0.0;
  std::function<double(double)> fprime_;
};

// Deterministic pushforward: each source cell's mass moves to the cell
// containing the image of the cell midpoint (first order; convergence is
// checked by grid doubling in the suites).
GridDensity Pushforward(const GridDensity& density, const Contraction1D& map);

struct PropagateOptions {
  // Mass allowed to fall off the grid per convolution step.
  double truncation_budget_per_step = 1e-12;
};

struct PropagateResult {
  GridDensity density;
  double total_truncation = 0.0;
};

// Runs the iteration: for each map, pushforward then convolve with a
// discretized N(0, sigma^2) kernel, renormalizing and recording truncated
// mass. Throws if any step truncates more than the budget.
PropagateResult Propagate(const GridDensity& initial, std::span<const Contraction1D> maps,
                          double sigma, const PropagateOptions& options = {});

// Riemann-sum Renyi divergence between two densities on a common grid,
// evaluated in log space over the cells both densities can vouch for (above
// their reliability floors; untrusted cells are excluded, which can only
// lower the result). Returns +infinity when more than 1e-9 of p's mass sits
// on cells where q vanishes outright (absolute-continuity failure).
double RenyiOnGrid(const GridDensity& p, const GridDensity& q, RenyiOrder order);

}  // namespace pai

#endif  // PAI_GRID_DENSITY_H_
