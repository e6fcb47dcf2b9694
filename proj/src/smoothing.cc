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

#include "pai/smoothing.h"

#include <cmath>
#include <stdexcept>

namespace pai {

SmoothedLoss::SmoothedLoss(std::shared_ptr<const LossFamily> base, ConvexSet set,
                           double lambda, int mc_samples)
    : LossFamily(base->lipschitz(), base->lipschitz() / lambda, base->dim(),
                 /*stochastic=*/true),
      base_(std::move(base)),
      set_(std::move(set)),
      lambda_(lambda),
      mc_samples_(mc_samples) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("SmoothedLoss: lambda must be > 0");
  }
  if (mc_samples < 1) throw std::invalid_argument("SmoothedLoss: mc_samples must be >= 1");
  if (base_->dim() != set_.dim()) {
    throw std::invalid_argument("SmoothedLoss: base loss and set dimension mismatch");
  }
}

double SmoothedLoss::ExtensionValue(const Vector& y, const Example& x) const {
  const Vector p = set_.Project(y);
  return base_->Value(p, x) + base_->lipschitz() * (y - p).norm();
}

Vector SmoothedLoss::ExtensionSubgradient(const Vector& y, const Example& x) const {
  const Vector p = set_.Project(y);
  const Vector inner = base_->Gradient(p, x);
  const Vector residual = y - p;
  const double dist = residual.norm();
  if (dist == 0.0) return inner;
  return set_.ChainThroughProjection(y, inner) + (base_->lipschitz() / dist) * residual;
}

double SmoothedLoss::Value(const Vector& w, const Example& x) const {
  return ExtensionValue(w, x);
}

Vector SmoothedLoss::GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const {
  if (rng == nullptr) {
    throw std::invalid_argument("SmoothedLoss::Gradient: stochastic oracle needs an rng");
  }
  if (!w.allFinite()) throw std::invalid_argument("SmoothedLoss::Gradient: w must be finite");
  Vector acc = Vector::Zero(dim_);
  Vector y(dim_);
  for (int s = 0; s < mc_samples_; ++s) {
    for (int i = 0; i < dim_; ++i) y[i] = w[i] + lambda_ * rng->NextGaussian();
    acc += ExtensionSubgradient(y, x);
  }
  return acc / mc_samples_;
}

Vector SmoothedGradient(const SmoothedLoss& loss, const Vector& w, const Example& x,
                        CounterRng& rng) {
  return loss.Gradient(w, x, &rng);
}

double SmoothedValueEstimate(const SmoothedLoss& loss, const Vector& w, const Example& x,
                             CounterRng& rng, int mc, double* se) {
  if (mc < 2) throw std::invalid_argument("SmoothedValueEstimate: mc must be >= 2");
  const int d = loss.dim();
  Vector y(d);
  double mean = 0.0, m2 = 0.0;
  for (int s = 1; s <= mc; ++s) {
    for (int i = 0; i < d; ++i) y[i] = w[i] + loss.lambda() * rng.NextGaussian();
    const double v = loss.ExtensionValue(y, x);
    const double delta = v - mean;
    mean += delta / s;
    m2 += delta * (v - mean);
  }
  if (se != nullptr) *se = std::sqrt(m2 / (static_cast<double>(mc) - 1.0) / mc);
  return mean;
}

double LambdaFor(double radius, double epsilon, double n, double delta) {
  if (!(radius > 0.0) || !(epsilon > 0.0) || !(n > 0.0)) {
    throw std::invalid_argument("LambdaFor: radius, epsilon, n must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("LambdaFor: delta must lie in (0,1)");
  }
  return radius * epsilon / (2.0 * std::sqrt(n * std::log(1.0 / delta)));
}

double ApproximationGapBound(double lipschitz, double lambda, double dim) {
  if (!(lipschitz >= 0.0) || !(lambda >= 0.0) || !(dim > 0.0)) {
    throw std::invalid_argument("ApproximationGapBound: inputs must be positive");
  }
  return lipschitz * lambda * std::sqrt(dim);
}

}  // namespace pai
