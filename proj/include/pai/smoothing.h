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
// Gaussian-convolution smoothing of a Lipschitz convex loss. The smoothed
// family of an L-Lipschitz base is L-Lipschitz and L/lambda-smooth over the
// feasible set, and deviates from the base by at most L*lambda*sqrt(d); its
// gradient oracle is the subgradient of the extended loss at w + Z with
// Z ~ N(0, lambda^2 I_d).
//
// The extension used off the set is h(w) = f(proj_K(w)) + L*dist(w, K),
// computable from the projection oracle and equal to the base loss on K. In
// d = 1 its subgradients never exceed L; in d >= 2 they can reach sqrt(2)*L
// just outside the boundary when the boundary gradient has a tangential
// component, a known gap of this computable extension.

#ifndef PAI_SMOOTHING_H_
#define PAI_SMOOTHING_H_

#include <memory>

#include "pai/convex.h"
#include "pai/loss.h"
#include "pai/rng.h"

namespace pai {

class SmoothedLoss : public LossFamily {
 public:
  // mc_samples is the per-gradient-call sample count; 1 (the default inside
  // SGD, which only needs an unbiased oracle) unless verifying properties.
  SmoothedLoss(std::shared_ptr<const LossFamily> base, ConvexSet set, double lambda,
               int mc_samples = 1);

  // Value of the extension h at w (not smoothed; smoothing the value needs
  // Monte Carlo, see SmoothedValueEstimate).
  double Value(const Vector& w, const Example& x) const override;

  // One subgradient of the extension h at y (used by the estimator; exposed
  // for the property tests).
  Vector ExtensionSubgradient(const Vector& y, const Example& x) const;
  double ExtensionValue(const Vector& y, const Example& x) const;

  double lambda() const { return lambda_; }
  int mc_samples() const { return mc_samples_; }
  const ConvexSet& set() const { return set_; }
  const LossFamily& base() const { return *base_; }

 protected:
  // mc_samples-averaged unbiased estimate of the smoothed gradient. Requires
  // an rng; throws without one.
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;

 private:
  std::shared_ptr<const LossFamily> base_;
  ConvexSet set_;
  double lambda_;
  int mc_samples_;
};

// Convenience wrapper around SmoothedLoss::Gradient.
Vector SmoothedGradient(const SmoothedLoss& loss, const Vector& w, const Example& x,
                        CounterRng& rng);

// Monte Carlo estimate of the smoothed value E[h(w + Z)] with mc draws;
// standard error returned through se when non-null.
double SmoothedValueEstimate(const SmoothedLoss& loss, const Vector& w, const Example& x,
                             CounterRng& rng, int mc, double* se = nullptr);

// Kernel width that makes the smoothed family's curvature admissible for the
// per-person learning rates: lambda = R*eps / (2 sqrt(n ln(1/delta))).
double LambdaFor(double radius, double epsilon, double n, double delta);

// Uniform value gap of smoothing: |f_hat - f| <= L * lambda * sqrt(d).
double ApproximationGapBound(double lipschitz, double lambda, double dim);

}  // namespace pai

#endif  // PAI_SMOOTHING_H_
