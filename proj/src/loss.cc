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

#include "pai/loss.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pai {

Example::Example(Vector f, double l) : features(std::move(f)), label(l) {
  if (!features.allFinite() || !std::isfinite(label)) {
    throw std::invalid_argument("Example: entries must be finite");
  }
}

LossFamily::LossFamily(double lipschitz, double smoothness, int dim, bool stochastic)
    : lipschitz_(lipschitz), smoothness_(smoothness), dim_(dim), stochastic_(stochastic) {
  if (dim < 1) throw std::invalid_argument("LossFamily: dim must be >= 1");
  if (lipschitz < 0.0) throw std::invalid_argument("LossFamily: lipschitz must be >= 0");
}

namespace {

double CheckedResidual(const Vector& w, const Example& x) {
  if (w.size() != x.features.size()) {
    throw std::invalid_argument("loss: w and features dimension mismatch");
  }
  return w.dot(x.features) - x.label;
}

}  // namespace

ClippedSquaredLoss::ClippedSquaredLoss(int dim, double feature_norm_bound, double clip)
    : LossFamily(clip * feature_norm_bound, feature_norm_bound * feature_norm_bound, dim),
      clip_(clip) {
  if (!(clip > 0.0) || !(feature_norm_bound > 0.0)) {
    throw std::invalid_argument("ClippedSquaredLoss: clip and feature bound must be > 0");
  }
}

double ClippedSquaredLoss::Value(const Vector& w, const Example& x) const {
  const double r = CheckedResidual(w, x);
  // Huber form, matching the clipped gradient.
  if (std::fabs(r) <= clip_) return 0.5 * r * r;
  return clip_ * std::fabs(r) - 0.5 * clip_ * clip_;
}

Vector ClippedSquaredLoss::GradientImpl(const Vector& w, const Example& x, CounterRng*) const {
  const double r = std::clamp(CheckedResidual(w, x), -clip_, clip_);
  return r * x.features;
}

LogisticLoss::LogisticLoss(int dim, double feature_norm_bound)
    : LossFamily(feature_norm_bound, feature_norm_bound * feature_norm_bound / 4.0, dim) {
  if (!(feature_norm_bound > 0.0)) {
    throw std::invalid_argument("LogisticLoss: feature bound must be > 0");
  }
}

double LogisticLoss::Value(const Vector& w, const Example& x) const {
  const double margin = x.label * w.dot(x.features);
  // log(1 + exp(-m)) without overflow for very negative margins.
  if (margin < 0.0) return -margin + std::log1p(std::exp(margin));
  return std::log1p(std::exp(-margin));
}

Vector LogisticLoss::GradientImpl(const Vector& w, const Example& x, CounterRng*) const {
  const double margin = x.label * w.dot(x.features);
  const double s = 1.0 / (1.0 + std::exp(margin));  // sigmoid(-margin)
  return (-x.label * s) * x.features;
}

HuberLoss::HuberLoss(int dim, double feature_norm_bound, double delta)
    : LossFamily(delta * feature_norm_bound, feature_norm_bound * feature_norm_bound, dim),
      delta_(delta) {
  if (!(delta > 0.0) || !(feature_norm_bound > 0.0)) {
    throw std::invalid_argument("HuberLoss: delta and feature bound must be > 0");
  }
}

double HuberLoss::Value(const Vector& w, const Example& x) const {
  const double r = CheckedResidual(w, x);
  if (std::fabs(r) <= delta_) return 0.5 * r * r;
  return delta_ * std::fabs(r) - 0.5 * delta_ * delta_;
}

Vector HuberLoss::GradientImpl(const Vector& w, const Example& x, CounterRng*) const {
  const double r = std::clamp(CheckedResidual(w, x), -delta_, delta_);
  return r * x.features;
}

HingeLoss::HingeLoss(int dim, double feature_norm_bound)
    : LossFamily(feature_norm_bound, std::numeric_limits<double>::infinity(), dim) {
  if (!(feature_norm_bound > 0.0)) {
    throw std::invalid_argument("HingeLoss: feature bound must be > 0");
  }
}

double HingeLoss::Value(const Vector& w, const Example& x) const {
  return std::max(0.0, 1.0 - x.label * w.dot(x.features));
}

Vector HingeLoss::GradientImpl(const Vector& w, const Example& x, CounterRng*) const {
  const double margin = x.label * w.dot(x.features);
  if (margin >= 1.0) return Vector::Zero(w.size());
  return (-x.label) * x.features;
}

ZeroLoss::ZeroLoss(int dim) : LossFamily(0.0, 0.0, dim) {}

double ZeroLoss::Value(const Vector&, const Example&) const { return 0.0; }

Vector ZeroLoss::GradientImpl(const Vector& w, const Example&, CounterRng*) const {
  return Vector::Zero(w.size());
}

}  // namespace pai
