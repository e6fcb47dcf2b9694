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
// Per-example convex loss families with declared Lipschitz and smoothness
// constants. The declared constants are honored over the stated feature-norm
// bound; the property tests sample gradients to confirm.

#ifndef PAI_LOSS_H_
#define PAI_LOSS_H_

#include <limits>
#include <memory>

#include "pai/convex.h"
#include "pai/rng.h"

namespace pai {

struct Example {
  Vector features;
  double label = 0.0;
  Example() = default;
  Example(Vector f, double l);
};

class LossFamily {
 public:
  virtual ~LossFamily() = default;

  virtual double Value(const Vector& w, const Example& x) const = 0;
  // A (sub)gradient in w. Stochastic families (smoothed losses) draw from
  // rng; deterministic families ignore it.
  Vector Gradient(const Vector& w, const Example& x, CounterRng* rng = nullptr) const {
    return GradientImpl(w, x, rng);
  }

  double lipschitz() const { return lipschitz_; }
  double smoothness() const { return smoothness_; }
  int dim() const { return dim_; }
  bool is_smooth() const { return std::isfinite(smoothness_); }
  bool is_stochastic() const { return stochastic_; }

 protected:
  LossFamily(double lipschitz, double smoothness, int dim, bool stochastic = false);
  virtual Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const = 0;
  double lipschitz_;
  double smoothness_;
  int dim_;
  bool stochastic_;
};

// Squared loss 0.5 (<w,x> - y)^2 with the residual clipped to +-clip, i.e.
// the gradient norm never exceeds clip * feature_norm_bound. The clipped
// loss is the Huber function of the residual, still convex. Constants over
// ||x|| <= feature_norm_bound: L = clip * bound, beta = bound^2.
class ClippedSquaredLoss : public LossFamily {
 public:
  ClippedSquaredLoss(int dim, double feature_norm_bound, double clip);
  double Value(const Vector& w, const Example& x) const override;
  double clip() const { return clip_; }

 protected:
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;

 private:
  double clip_;
};

// ln(1 + exp(-y <w,x>)) with labels in {-1, +1}.
// L = bound, beta = bound^2 / 4.
class LogisticLoss : public LossFamily {
 public:
  LogisticLoss(int dim, double feature_norm_bound);
  double Value(const Vector& w, const Example& x) const override;

 protected:
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;
};

// Huber loss of the residual with transition width `delta`.
// L = delta * bound, beta = bound^2.
class HuberLoss : public LossFamily {
 public:
  HuberLoss(int dim, double feature_norm_bound, double delta);
  double Value(const Vector& w, const Example& x) const override;

 protected:
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;

 private:
  double delta_;
};

// max(0, 1 - y <w,x>) with labels in {-1, +1}. Non-smooth: usable with the
// amplification accountants only after smoothing. L = bound.
class HingeLoss : public LossFamily {
 public:
  HingeLoss(int dim, double feature_norm_bound);
  double Value(const Vector& w, const Example& x) const override;

 protected:
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;
};

// Constant-zero loss; gradient is identically zero.
class ZeroLoss : public LossFamily {
 public:
  explicit ZeroLoss(int dim);
  double Value(const Vector& w, const Example& x) const override;

 protected:
  Vector GradientImpl(const Vector& w, const Example& x, CounterRng* rng) const override;
};

}  // namespace pai

#endif  // PAI_LOSS_H_
