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
// Test-only oracles, independent of the library code paths they check.

#ifndef PAI_TESTS_TEST_ORACLES_H_
#define PAI_TESTS_TEST_ORACLES_H_

#include <cmath>
#include <numbers>
#include <vector>

namespace pai_test {

// Direct numerical quadrature of the order-alpha divergence integral
// (1/(alpha-1)) ln Int (p/q)^alpha q between N(mu_p, sigma^2) and
// N(mu_q, sigma^2), by Simpson's rule over the tilted integrand's support.
inline double GaussianRenyiQuadrature(double mu_p, double mu_q, double sigma, double alpha) {
  const double gap = mu_q - mu_p;
  // The integrand is a Gaussian of width sigma centered at mu_p - (alpha-1)*gap.
  const double center = mu_p - (alpha - 1.0) * gap;
  const double halfwidth = 14.0 * sigma + std::fabs(gap);
  const int n = 200000;  // even
  const double lo = center - halfwidth;
  const double step = 2.0 * halfwidth / n;
  auto log_density = [sigma](double x, double mu) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  auto integrand = [&](double x) {
    return std::exp(alpha * log_density(x, mu_p) + (1.0 - alpha) * log_density(x, mu_q));
  };
  double sum = integrand(lo) + integrand(lo + 2.0 * halfwidth);
  for (int i = 1; i < n; ++i) {
    sum += integrand(lo + i * step) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  const double integral = sum * step / 3.0;
  return std::log(integral) / (alpha - 1.0);
}

// Chi-squared upper-quantile test statistic for uniformity of draws over
// {0, ..., bins-1}.
inline double ChiSquaredStatistic(const std::vector<long>& counts, long total) {
  const double expected = static_cast<double>(total) / counts.size();
  double stat = 0.0;
  for (long c : counts) {
    const double d = c - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace pai_test

#endif  // PAI_TESTS_TEST_ORACLES_H_
