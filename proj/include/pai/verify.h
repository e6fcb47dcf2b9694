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
// Numerical verification suites: the 1-D density oracle propagates real
// contractive noisy iterations and its divergences are compared against the
// accountant's bounds case by case. Reports serialize to JSON lines.

#ifndef PAI_VERIFY_H_
#define PAI_VERIFY_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pai/accountant.h"
#include "pai/grid_density.h"

namespace pai {

struct VerifyCase {
  std::string suite;
  std::string name;
  double oracle = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // oracle / bound where meaningful
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  uint64_t seed = 20260809;
  int random_trials = 200;
  int grid_cells = 1 << 14;
  // Test-only mutation hook: the accountant-side Gaussian shift cost is
  // computed as alpha a^2 / (renyi_denominator sigma^2). 2 is the correct
  // constant; the verify CLI can inject a wrong one to prove the suites
  // would catch it.
  double renyi_denominator = 2.0;
};

// Compares the oracle divergence of a CNI started at x0 vs x0p (same maps,
// per-step noise sigma) with the schedule bound. The schedule must carry the
// whole gap in s_1 and zeros after. `wide_support` sizes the grid for the
// order-alpha integrand (needed for tightness checks).
VerifyCase VerifyPai1d(double x0, double x0p, std::span<const Contraction1D> maps,
                       double sigma, RenyiOrder order, const ShiftSchedule& schedule,
                       const VerifyOptions& options = {}, bool check_tightness = false,
                       bool wide_support = false);

// Checks the translation-coupling inequality for one noise-addition step on
// point masses: the computable left upper bound never exceeds the shifted
// pre-noise bound plus the noise shift cost, whenever the right side is
// finite.
VerifyCase VerifyShiftReduction1d(double gap, double z, double a, double sigma,
                                  RenyiOrder order);

// Individual suites (each returns one VerifyCase per configuration).
std::vector<VerifyCase> GaussianClosedFormSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> PaiRandomSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> PaiIdentityTightnessSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> ShiftReductionSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> DataProcessingSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> PropagateMomentsSuite(const VerifyOptions& options = {});
std::vector<VerifyCase> GridDoublingSuite(const VerifyOptions& options = {});

// All suites, in a fixed order.
std::vector<VerifyCase> RunAllSuites(const VerifyOptions& options = {});

bool AllPass(std::span<const VerifyCase> cases);
void WriteJsonLines(std::span<const VerifyCase> cases, std::ostream& out);

}  // namespace pai

#endif  // PAI_VERIFY_H_
