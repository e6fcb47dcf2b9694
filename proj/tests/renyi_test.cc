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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pai/rng.h"
#include "test_oracles.h"

namespace pai {
namespace {

TEST(RenyiOrderTest, RejectsInvalidOrders) {
  EXPECT_THROW(RenyiOrder(1.0), std::invalid_argument);
  EXPECT_THROW(RenyiOrder(0.5), std::invalid_argument);
  EXPECT_THROW(RenyiOrder(std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_THROW(RenyiOrder(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(RenyiOrder(1.0 + 1e-9));
}

TEST(GaussianRenyiTest, ClosedFormExamples) {
  EXPECT_EQ(GaussianRenyi(GaussianNoise(1.0), 0.0, RenyiOrder(2.0)), 0.0);
  EXPECT_DOUBLE_EQ(GaussianRenyi(GaussianNoise(1.0), 1.0, RenyiOrder(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(GaussianRenyi(GaussianNoise(2.0), 3.0, RenyiOrder(5.0)), 5.625);
}

TEST(GaussianRenyiTest, IndependentOfDimension) {
  EXPECT_EQ(GaussianRenyi(GaussianNoise(1.5, 1), 0.7, RenyiOrder(3.0)),
            GaussianRenyi(GaussianNoise(1.5, 64), 0.7, RenyiOrder(3.0)));
}

TEST(GaussianRenyiTest, RejectsBadInputs) {
  EXPECT_THROW(GaussianNoise(0.0), std::invalid_argument);
  EXPECT_THROW(GaussianNoise(-1.0), std::invalid_argument);
  EXPECT_THROW(GaussianNoise(std::nan("")), std::invalid_argument);
  EXPECT_THROW(GaussianRenyi(GaussianNoise(1.0), -0.1, RenyiOrder(2.0)),
               std::invalid_argument);
  EXPECT_THROW(GaussianRenyi(GaussianNoise(1.0), std::nan(""), RenyiOrder(2.0)),
               std::invalid_argument);
}

TEST(GaussianRenyiTest, ExactlyQuadraticInDisplacement) {
  for (double a : {0.25, 0.9, 2.0, 7.5}) {
    const double one = GaussianRenyi(GaussianNoise(1.3), a, RenyiOrder(3.5));
    const double two = GaussianRenyi(GaussianNoise(1.3), 2.0 * a, RenyiOrder(3.5));
    EXPECT_NEAR(two / one, 4.0, 1e-12);
  }
}

TEST(GaussianRenyiTest, MonotoneInEachParameter) {
  const RenyiOrder order(2.0);
  double prev = -1.0;
  for (double a : {0.0, 0.5, 1.0, 2.0}) {
    const double v = GaussianRenyi(GaussianNoise(1.0), a, order);
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = -1.0;
  for (double alpha : {1.5, 2.0, 4.0, 8.0}) {
    const double v = GaussianRenyi(GaussianNoise(1.0), 1.0, RenyiOrder(alpha));
    EXPECT_GE(v, prev);
    prev = v;
  }
  prev = 1e300;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const double v = GaussianRenyi(GaussianNoise(sigma), 1.0, order);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

// The closed form against direct quadrature of the divergence integral.
TEST(GaussianRenyiTest, AgreesWithQuadrature) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (double a : {0.5, 1.0, 2.0}) {
      for (double alpha : {1.5, 2.0, 4.0}) {
        const double closed = GaussianRenyi(GaussianNoise(sigma), a, RenyiOrder(alpha));
        const double quad = pai_test::GaussianRenyiQuadrature(0.0, a, sigma, alpha);
        EXPECT_NEAR(quad / closed, 1.0, 1e-6)
            << "sigma=" << sigma << " a=" << a << " alpha=" << alpha;
      }
    }
  }
}

TEST(RdpToDpTest, Examples) {
  EXPECT_DOUBLE_EQ(RdpToDp(RenyiBound(RenyiOrder(2.0), 0.0), std::exp(-1.0)).epsilon, 1.0);
  EXPECT_NEAR(RdpToDp(RenyiBound(RenyiOrder(3.0), 0.5), 0.01).epsilon,
              0.5 + std::log(100.0) / 2.0, 1e-12);
  EXPECT_NEAR(RdpToDp(RenyiBound(RenyiOrder(11.0), 1.0), 1e-6).epsilon,
              1.0 + std::log(1e6) / 10.0, 1e-12);
}

TEST(RdpToDpTest, ZeroRdpGivesPureConversionTerm) {
  const double delta = 0.037;
  const RenyiOrder order(5.5);
  EXPECT_DOUBLE_EQ(RdpToDp(RenyiBound(order, 0.0), delta).epsilon,
                   std::log(1.0 / delta) / (order.alpha - 1.0));
}

TEST(RdpToDpTest, RejectsBadDelta) {
  const RenyiBound bound(RenyiOrder(2.0), 0.1);
  EXPECT_THROW(RdpToDp(bound, 0.0), std::invalid_argument);
  EXPECT_THROW(RdpToDp(bound, 1.0), std::invalid_argument);
  EXPECT_THROW(RdpToDp(bound, -0.3), std::invalid_argument);
}

TEST(ComposeRdpTest, Examples) {
  const RenyiOrder order(2.0);
  EXPECT_EQ(ComposeRdp(order, {}).epsilon, 0.0);

  const std::vector<RenyiBound> two = {RenyiBound(order, 0.1), RenyiBound(order, 0.2)};
  EXPECT_NEAR(ComposeRdp(order, two).epsilon, 0.3, 1e-15);

  const std::vector<RenyiBound> rep(7, RenyiBound(order, 0.25));
  EXPECT_DOUBLE_EQ(ComposeRdp(order, rep).epsilon, 7 * 0.25);
}

TEST(ComposeRdpTest, RejectsMismatchedOrders) {
  const std::vector<RenyiBound> mixed = {RenyiBound(RenyiOrder(2.0), 0.1),
                                         RenyiBound(RenyiOrder(3.0), 0.1)};
  EXPECT_THROW(ComposeRdp(RenyiOrder(2.0), mixed), std::invalid_argument);
}

TEST(ComposeRdpTest, OrderOfCompositionIrrelevant) {
  CounterRng rng(99, Stream::kTest);
  const RenyiOrder order(4.0);
  std::vector<RenyiBound> bounds;
  for (int i = 0; i < 10; ++i) bounds.emplace_back(order, rng.NextUniform());
  const double forward = ComposeRdp(order, bounds).epsilon;
  std::vector<RenyiBound> reversed(bounds.rbegin(), bounds.rend());
  EXPECT_NEAR(ComposeRdp(order, reversed).epsilon, forward, 1e-12 * forward);
  // Associativity: compose a prefix, then the rest.
  std::vector<RenyiBound> head(bounds.begin(), bounds.begin() + 4);
  std::vector<RenyiBound> tail(bounds.begin() + 4, bounds.end());
  const std::vector<RenyiBound> grouped = {ComposeRdp(order, head), ComposeRdp(order, tail)};
  EXPECT_NEAR(ComposeRdp(order, grouped).epsilon, forward, 1e-12 * forward);
}

TEST(ShiftReductionStepTest, SpendsShiftAndPaysNoiseCost) {
  const ShiftedBudget out = ShiftReductionStep(ShiftedBudget(0.5, 0.0, RenyiOrder(2.0)), 0.5,
                                               GaussianNoise(1.0));
  EXPECT_EQ(out.shift_z, 0.0);
  EXPECT_DOUBLE_EQ(out.epsilon, 0.25);
}

TEST(ShiftReductionStepTest, ZeroAllowanceIsIdentity) {
  const ShiftedBudget in(1.0, 0.3, RenyiOrder(2.0));
  const ShiftedBudget out = ShiftReductionStep(in, 0.0, GaussianNoise(1.0));
  EXPECT_EQ(out.shift_z, 1.0);
  EXPECT_EQ(out.epsilon, 0.3);
}

TEST(ShiftReductionStepTest, InfeasibleAllowanceThrows) {
  EXPECT_THROW(ShiftReductionStep(ShiftedBudget(0.1, 0.0, RenyiOrder(2.0)), 0.2,
                                  GaussianNoise(1.0)),
               FeasibilityError);
}

TEST(ContractionStepTest, Examples) {
  const RenyiOrder order(2.0);
  const double drift = 0.37;  // stands in for 2*eta*L
  const ShiftedBudget a = ContractionStep(ShiftedBudget(0.0, 0.0, order), drift);
  EXPECT_EQ(a.shift_z, drift);
  EXPECT_EQ(a.epsilon, 0.0);

  const ShiftedBudget b = ContractionStep(ShiftedBudget(1.0, 0.5, order), 0.0);
  EXPECT_EQ(b.shift_z, 1.0);
  EXPECT_EQ(b.epsilon, 0.5);

  const ShiftedBudget c = ContractionStep(ShiftedBudget(0.3, 0.1, order), 0.2);
  EXPECT_DOUBLE_EQ(c.shift_z, 0.5);
  EXPECT_EQ(c.epsilon, 0.1);
}

TEST(ShiftedGaussianUpperTest, Examples) {
  EXPECT_EQ(ShiftedGaussianUpper(1.0, 1.0, 1.0, RenyiOrder(2.0)), 0.0);
  EXPECT_DOUBLE_EQ(ShiftedGaussianUpper(1.0, 0.0, 1.0, RenyiOrder(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(ShiftedGaussianUpper(2.0, 0.5, 1.0, RenyiOrder(3.0)), 3.375);
  // Shift beyond the gap absorbs everything.
  EXPECT_EQ(ShiftedGaussianUpper(1.0, 5.0, 1.0, RenyiOrder(2.0)), 0.0);
}

// Folding contraction then shift-reduction over any feasible schedule with
// matching totals must end at shift 0 with epsilon = sum of per-step noise
// costs.
TEST(BudgetCalculusTest, FoldReachesZeroShiftWithSummedCost) {
  CounterRng rng(1234, Stream::kTest);
  const RenyiOrder order(3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int steps = 1 + static_cast<int>(rng.NextBelow(12));
    // Random per-step drifts; allowances spend a random share of whatever
    // shift is available, and the last step drains the remainder.
    std::vector<double> drifts(steps), allowances(steps);
    double z = 0.0;
    for (int t = 0; t < steps; ++t) {
      drifts[t] = 2.0 * rng.NextUniform();
      z += drifts[t];
      allowances[t] = t + 1 == steps ? z : z * rng.NextUniform();
      z -= allowances[t];
    }
    ShiftedBudget budget(0.0, 0.0, order);
    double expected_eps = 0.0;
    double total_drift = 0.0;
    for (int t = 0; t < steps; ++t) {
      const double sigma = 0.5 + 2.0 * rng.NextUniform();
      budget = ContractionStep(budget, drifts[t]);
      budget = ShiftReductionStep(budget, allowances[t], GaussianNoise(sigma));
      expected_eps += order.alpha * allowances[t] * allowances[t] / (2.0 * sigma * sigma);
      total_drift += drifts[t];
    }
    EXPECT_NEAR(budget.shift_z, 0.0, 1e-12 * std::max(1.0, total_drift));
    EXPECT_NEAR(budget.epsilon, expected_eps, 1e-12 * std::max(1.0, expected_eps));
  }
}

}  // namespace
}  // namespace pai
