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

#include "pai/verify.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pai/rng.h"

namespace pai {
namespace {

// Oracle-vs-bound acceptance: oracle <= bound * (1 + 1e-3) + 1e-6.
constexpr double kRelTol = 1e-3;
constexpr double kAbsTol = 1e-6;

double HookedShiftCost(const VerifyOptions& options, double sigma, double a, double alpha) {
  return alpha * a * a / (options.renyi_denominator * sigma * sigma);
}

// Accountant bound with the mutation hook applied (a pure rescaling of the
// Gaussian shift cost).
double HookedPaiBound(const ShiftSchedule& schedule, double sigma, RenyiOrder order,
                      const VerifyOptions& options) {
  const std::vector<double> sigmas(schedule.steps(), sigma);
  const double exact = PaiBound(schedule, sigmas, order).epsilon;
  return exact * (2.0 / options.renyi_denominator);
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

// Grid aligned so that x0 and x0p both sit exactly on cell centers; the
// discretized starting gap then matches the schedule's s_1 exactly.
struct AlignedGrid {
  double lo, hi;
  int cells;
  int cell_x0, cell_x0p;
};

AlignedGrid AlignGrid(double x0, double x0p, double halfwidth, int cells) {
  const double gap = std::fabs(x0 - x0p);
  double delta = 2.0 * halfwidth / cells;
  int k = 0;
  if (gap > 0.0) {
    k = std::max(1, static_cast<int>(std::lround(gap / delta)));
    delta = gap / k;
  }
  const int j0 = cells / 2;
  const double lo = x0 - (j0 + 0.5) * delta;
  AlignedGrid g{lo, lo + cells * delta, cells, j0, j0};
  if (gap > 0.0) g.cell_x0p = x0p > x0 ? j0 + k : j0 - k;
  return g;
}

GridDensity CellPointMass(const AlignedGrid& grid, int cell) {
  GridDensity d{grid.lo, grid.hi, grid.cells, std::vector<double>(grid.cells, 0.0)};
  d.mass[cell] = 1.0;
  return d;
}

template <typename Fn>
std::vector<VerifyCase> ParallelCases(int count, Fn&& make_case) {
  const int workers =
      std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), count));
  std::vector<std::future<std::vector<VerifyCase>>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&make_case, w, workers, count]() {
      std::vector<VerifyCase> local;
      for (int i = w; i < count; i += workers) local.push_back(make_case(i));
      return local;
    }));
  }
  std::vector<VerifyCase> merged;
  merged.reserve(count);
  for (auto& f : futures) {
    std::vector<VerifyCase> chunk = f.get();
    merged.insert(merged.end(), chunk.begin(), chunk.end());
  }
  std::sort(merged.begin(), merged.end(),
            [](const VerifyCase& a, const VerifyCase& b) { return a.name < b.name; });
  return merged;
}

}  // namespace

VerifyCase VerifyPai1d(double x0, double x0p, std::span<const Contraction1D> maps,
                       double sigma, RenyiOrder order, const ShiftSchedule& schedule,
                       const VerifyOptions& options, bool check_tightness,
                       bool wide_support) {
  const int T = static_cast<int>(maps.size());
  if (schedule.steps() != T) {
    throw std::invalid_argument("VerifyPai1d: schedule and map count mismatch");
  }
  const double gap = std::fabs(x0 - x0p);
  if (std::fabs(schedule.s[0] - gap) > 1e-12 * std::max(1.0, gap)) {
    throw std::invalid_argument("VerifyPai1d: schedule must carry the gap in s_1");
  }
  for (int t = 1; t < T; ++t) {
    if (schedule.s[t] != 0.0) {
      throw std::invalid_argument("VerifyPai1d: schedule must have s_t = 0 for t > 1");
    }
  }

  const double spread = 8.0 * sigma * std::sqrt(static_cast<double>(T));
  double halfwidth = std::max(std::fabs(x0), std::fabs(x0p)) + gap + spread;
  int cells = options.grid_cells;
  if (wide_support) {
    // The order-alpha integrand is a Gaussian centered at alpha*gap.
    halfwidth = std::max(std::fabs(x0), std::fabs(x0p)) + order.alpha * gap +
                10.0 * sigma * std::sqrt(static_cast<double>(T));
    cells = std::max(cells, 1 << 15);
  }
  const AlignedGrid grid = AlignGrid(x0, x0p, halfwidth, cells);

  const PropagateResult p = Propagate(CellPointMass(grid, grid.cell_x0), maps, sigma);
  const PropagateResult q = Propagate(CellPointMass(grid, grid.cell_x0p), maps, sigma);
  const double oracle = RenyiOnGrid(p.density, q.density, order);
  const double bound = HookedPaiBound(schedule, sigma, order, options);

  VerifyCase result;
  result.suite = "pai_1d";
  result.oracle = oracle;
  result.bound = bound;
  result.ratio = bound > 0.0 ? oracle / bound : (oracle == 0.0 ? 1.0 : 0.0);
  result.pass = oracle <= bound * (1.0 + kRelTol) + kAbsTol;
  if (check_tightness && result.pass) {
    result.pass = result.ratio >= 0.99;
    if (!result.pass) result.detail = "tightness ratio below 0.99";
  }
  if (!result.pass && result.detail.empty()) result.detail = "oracle exceeds bound";
  return result;
}

VerifyCase VerifyShiftReduction1d(double gap, double z, double a, double sigma,
                                  RenyiOrder order) {
  VerifyCase result;
  result.suite = "shift_reduction_1d";
  std::ostringstream name;
  name << "gap=" << gap << ",z=" << z << ",a=" << a << ",sigma=" << sigma
       << ",alpha=" << order.alpha;
  result.name = name.str();
  // Left side: computable upper bound on the z-shifted divergence of the
  // convolved point masses. Right side: shifted pre-noise divergence (0 when
  // the shift z+a absorbs the gap, infinite otherwise) plus the noise cost.
  const double left = ShiftedGaussianUpper(gap, z, sigma, order);
  const bool right_finite = gap <= z + a + 1e-12;
  const double noise_cost = GaussianRenyi(GaussianNoise(sigma), a, order);
  result.oracle = left;
  if (right_finite) {
    result.bound = noise_cost;
    result.pass = left <= noise_cost + 1e-12;
    result.ratio = noise_cost > 0.0 ? left / noise_cost : (left == 0.0 ? 1.0 : 0.0);
  } else {
    result.bound = std::numeric_limits<double>::infinity();
    result.pass = true;
    result.detail = "right side infinite; inequality vacuous";
  }
  return result;
}

std::vector<VerifyCase> GaussianClosedFormSuite(const VerifyOptions& options) {
  // Kept inside the range where the order-alpha integrand (a Gaussian
  // centered alpha*a away) stays representable in double precision.
  const double sigmas[] = {0.7, 1.0, 2.0};
  const double gaps[] = {0.25, 0.7, 1.5};
  const double alphas[] = {1.5, 2.0, 4.0, 8.0};
  std::vector<VerifyCase> cases;
  for (double sigma : sigmas) {
    for (double a : gaps) {
      for (double alpha : alphas) {
        const double halfwidth = alpha * a + 12.0 * sigma;
        const int cells = 1 << 15;
        const GridDensity p = GridDensity::Gaussian(0.0, sigma, -halfwidth, halfwidth, cells);
        const GridDensity q = GridDensity::Gaussian(a, sigma, -halfwidth, halfwidth, cells);
        const double oracle = RenyiOnGrid(p, q, RenyiOrder(alpha));
        const double expected = HookedShiftCost(options, sigma, a, alpha);
        VerifyCase c;
        c.suite = "gaussian_closed_form";
        std::ostringstream name;
        name << "sigma=" << sigma << ",a=" << a << ",alpha=" << alpha;
        c.name = name.str();
        c.oracle = oracle;
        c.bound = expected;
        c.ratio = oracle / expected;
        c.pass = std::fabs(oracle - expected) <= 0.005 * expected;
        if (!c.pass) c.detail = "grid divergence off the closed form by more than 0.5%";
        cases.push_back(std::move(c));
      }
    }
  }
  return cases;
}

namespace {

Contraction1D RandomMap(CounterRng& rng, double scale_hint) {
  switch (rng.NextBelow(4)) {
    case 0:
      return Contraction1D::Identity();
    case 1: {
      const double a = (2.0 * rng.NextUniform() - 1.0) * scale_hint;
      const double b = (2.0 * rng.NextUniform() - 1.0) * scale_hint;
      return Contraction1D::Clamp(std::min(a, b), std::max(a, b));
    }
    case 2:
      return Contraction1D::Scale(rng.NextUniform());
    default: {
      const double eta = 0.1 + 0.9 * rng.NextUniform();
      const double slope = 2.0 * rng.NextUniform() / eta;  // eta*slope <= 2
      const double clip = 0.5 + 3.0 * rng.NextUniform();
      const double center = (2.0 * rng.NextUniform() - 1.0);
      return Contraction1D::GradStep(eta, [slope, clip, center](double x) {
        return std::clamp(slope * (x - center), -clip, clip);
      });
    }
  }
}

}  // namespace

std::vector<VerifyCase> PaiRandomSuite(const VerifyOptions& options) {
  return ParallelCases(options.random_trials, [&options](int trial) {
    CounterRng rng(options.seed, Stream::kTest, 100, static_cast<uint64_t>(trial));
    const int T = 1 + static_cast<int>(rng.NextBelow(32));
    const double sigma = 0.2 + 4.8 * rng.NextUniform();
    const double gap = 3.0 * rng.NextUniform();
    const double alphas[] = {1.5, 2.0, 4.0, 8.0};
    const RenyiOrder order(alphas[rng.NextBelow(4)]);
    const double x0 = (2.0 * rng.NextUniform() - 1.0);
    const double x0p = x0 + gap;

    std::vector<Contraction1D> maps;
    maps.reserve(T);
    const double scale_hint = std::max(1.0, gap + 2.0 * sigma);
    for (int t = 0; t < T; ++t) maps.push_back(RandomMap(rng, scale_hint));

    // Random feasible allowances: nonnegative weights normalized to the gap,
    // all of which arrives in s_1.
    std::vector<double> s(T, 0.0), a(T, 0.0);
    s[0] = gap;
    double total = 0.0;
    std::vector<double> weights(T);
    for (int t = 0; t < T; ++t) {
      weights[t] = rng.NextUniform();
      total += weights[t];
    }
    for (int t = 0; t < T; ++t) a[t] = gap * weights[t] / total;

    VerifyCase c = VerifyPai1d(x0, x0p, maps, sigma, order, ShiftSchedule(s, a), options);
    std::ostringstream name;
    name << "random_" << (trial < 100 ? (trial < 10 ? "00" : "0") : "") << trial;
    c.name = name.str();
    c.detail += " T=" + std::to_string(T) + " sigma=" + FormatDouble(sigma) +
                " gap=" + FormatDouble(gap) + " alpha=" + FormatDouble(order.alpha);
    return c;
  });
}

std::vector<VerifyCase> PaiIdentityTightnessSuite(const VerifyOptions& options) {
  struct Config {
    int T;
    double sigma;
    double alpha;
  };
  std::vector<Config> configs;
  for (int T : {1, 4, 16, 32}) {
    for (double alpha : {1.5, 2.0, 4.0, 8.0}) configs.push_back({T, 1.0, alpha});
  }
  configs.push_back({4, 0.5, 2.0});
  configs.push_back({8, 2.5, 4.0});
  configs.push_back({2, 0.3, 1.5});
  configs.push_back({32, 0.5, 8.0});

  return ParallelCases(static_cast<int>(configs.size()), [&](int i) {
    const Config& cfg = configs[i];
    // Moderate bounds keep the order-alpha integrand above the propagated
    // densities' reliability floors, so near-equality is actually measurable.
    const double target_eps = std::min(1.0, 6.0 / cfg.alpha);
    const double gap =
        std::min(3.0, std::sqrt(2.0 * target_eps * cfg.T / cfg.alpha) * cfg.sigma);
    std::vector<Contraction1D> maps(cfg.T, Contraction1D::Identity());
    std::vector<double> s(cfg.T, 0.0), a(cfg.T, gap / cfg.T);
    s[0] = gap;
    VerifyCase c = VerifyPai1d(0.0, gap, maps, cfg.sigma, RenyiOrder(cfg.alpha),
                               ShiftSchedule(s, a), options,
                               /*check_tightness=*/true, /*wide_support=*/true);
    std::ostringstream name;
    name << "identity_T=" << cfg.T << ",sigma=" << cfg.sigma << ",alpha=" << cfg.alpha;
    c.name = name.str();
    c.suite = "pai_identity_tightness";
    return c;
  });
}

std::vector<VerifyCase> ShiftReductionSuite(const VerifyOptions&) {
  std::vector<VerifyCase> cases;
  for (double gap : {0.0, 0.5, 1.0, 2.0}) {
    for (double z : {0.0, 0.25, 1.0}) {
      for (double a : {0.0, 0.5, 0.75, 1.5}) {
        for (double sigma : {0.5, 1.0, 2.0}) {
          cases.push_back(VerifyShiftReduction1d(gap, z, a, sigma, RenyiOrder(2.0)));
        }
      }
    }
  }
  // Boundary equality of the translation coupling: both sides 0.5625.
  cases.push_back(VerifyShiftReduction1d(1.0, 0.25, 0.75, 1.0, RenyiOrder(2.0)));
  return cases;
}

std::vector<VerifyCase> DataProcessingSuite(const VerifyOptions& options) {
  return ParallelCases(50, [&options](int trial) {
    CounterRng rng(options.seed, Stream::kTest, 200, static_cast<uint64_t>(trial));
    const int cells = 1 << 12;
    const double halfwidth = 8.0;
    // Random two-component Gaussian mixtures sharing a grid.
    auto random_mixture = [&]() {
      const double m1 = 4.0 * (rng.NextUniform() - 0.5);
      const double m2 = 4.0 * (rng.NextUniform() - 0.5);
      const double s1 = 0.3 + rng.NextUniform();
      const double s2 = 0.3 + rng.NextUniform();
      const double w = rng.NextUniform();
      GridDensity g1 = GridDensity::Gaussian(m1, s1, -halfwidth, halfwidth, cells);
      const GridDensity g2 = GridDensity::Gaussian(m2, s2, -halfwidth, halfwidth, cells);
      for (int i = 0; i < cells; ++i) g1.mass[i] = w * g1.mass[i] + (1.0 - w) * g2.mass[i];
      return g1;
    };
    const GridDensity p = random_mixture();
    const GridDensity q = random_mixture();
    CounterRng map_rng(options.seed, Stream::kTest, 201, static_cast<uint64_t>(trial));
    const Contraction1D map = RandomMap(map_rng, 4.0);
    const RenyiOrder order(1.5 + 3.0 * rng.NextUniform());
    const double before = RenyiOnGrid(p, q, order);
    const double after = RenyiOnGrid(Pushforward(p, map), Pushforward(q, map), order);
    VerifyCase c;
    c.suite = "data_processing";
    c.name = "dpi_" + std::to_string(trial);
    c.oracle = after;
    c.bound = before;
    c.ratio = before > 0.0 ? after / before : 1.0;
    c.pass = after <= before + 1e-6;
    if (!c.pass) c.detail = "pushforward increased the divergence";
    return c;
  });
}

std::vector<VerifyCase> PropagateMomentsSuite(const VerifyOptions&) {
  std::vector<VerifyCase> cases;

  for (int T : {4, 16}) {
    const double sigma = 0.7;
    const double halfwidth = 8.0 * sigma * std::sqrt(static_cast<double>(T)) + 1.0;
    const int cells = 1 << 14;
    const GridDensity start = GridDensity::PointMass(0.0, -halfwidth, halfwidth, cells);
    const std::vector<Contraction1D> maps(T, Contraction1D::Identity());
    const PropagateResult r = Propagate(start, maps, sigma);
    const double want_var = T * sigma * sigma;
    VerifyCase c;
    c.suite = "propagate_moments";
    c.name = "identity_T=" + std::to_string(T);
    c.oracle = r.density.Variance();
    c.bound = want_var;
    c.ratio = c.oracle / want_var;
    c.pass = std::fabs(r.density.Mean()) <= r.density.Delta() &&
             std::fabs(c.oracle - want_var) <= 1e-3 * want_var;
    if (!c.pass) c.detail = "sum-of-Gaussians moments off";
    cases.push_back(std::move(c));
  }

  {
    // A scale(0) step collapses any input to a point; after noise the
    // density is exactly the kernel.
    const double sigma = 1.3;
    const int cells = 1 << 14;
    const GridDensity start = GridDensity::Gaussian(2.0, 1.0, -16.0, 16.0, cells);
    const std::vector<Contraction1D> maps = {Contraction1D::Scale(0.0)};
    const PropagateResult r = Propagate(start, maps, sigma);
    VerifyCase c;
    c.suite = "propagate_moments";
    c.name = "scale0";
    c.oracle = r.density.Variance();
    c.bound = sigma * sigma;
    c.ratio = c.oracle / c.bound;
    c.pass = std::fabs(r.density.Mean()) <= 2.0 * r.density.Delta() &&
             std::fabs(c.oracle - c.bound) <= 1e-3 * c.bound;
    if (!c.pass) c.detail = "collapse-then-noise moments off";
    cases.push_back(std::move(c));
  }

  {
    // Clamping N(0,1) to [0, inf) parks half the mass at the boundary cell.
    const int cells = 1 << 14;
    const GridDensity start = GridDensity::Gaussian(0.0, 1.0, -12.0, 12.0, cells);
    const GridDensity pushed = Pushforward(start, Contraction1D::Clamp(0.0, 1e9));
    const double boundary_mass = pushed.mass[pushed.CellOf(0.0)];
    VerifyCase c;
    c.suite = "propagate_moments";
    c.name = "clamp_half_gaussian";
    c.oracle = boundary_mass;
    c.bound = 0.5;
    c.ratio = boundary_mass / 0.5;
    c.pass = std::fabs(boundary_mass - 0.5) <= 0.01;
    if (!c.pass) c.detail = "boundary atom mass off 0.5";
    cases.push_back(std::move(c));
  }

  return cases;
}

std::vector<VerifyCase> GridDoublingSuite(const VerifyOptions& options) {
  return ParallelCases(3, [&options](int trial) {
    CounterRng rng(options.seed, Stream::kTest, 300, static_cast<uint64_t>(trial));
    const int T = 4 + static_cast<int>(rng.NextBelow(8));
    const double sigma = 0.5 + rng.NextUniform();
    const double gap = 0.5 + rng.NextUniform();
    std::vector<Contraction1D> maps;
    for (int t = 0; t < T; ++t) maps.push_back(RandomMap(rng, 2.0));

    auto divergence_at = [&](int cells) {
      const double halfwidth = 1.0 + gap + 8.0 * sigma * std::sqrt(static_cast<double>(T));
      const AlignedGrid grid = AlignGrid(0.0, gap, halfwidth, cells);
      const PropagateResult p = Propagate(CellPointMass(grid, grid.cell_x0), maps, sigma);
      const PropagateResult q = Propagate(CellPointMass(grid, grid.cell_x0p), maps, sigma);
      return RenyiOnGrid(p.density, q.density, RenyiOrder(2.0));
    };
    const double coarse = divergence_at(options.grid_cells);
    const double fine = divergence_at(options.grid_cells * 2);
    VerifyCase c;
    c.suite = "grid_doubling";
    c.name = "doubling_" + std::to_string(trial);
    c.oracle = coarse;
    c.bound = fine;
    c.ratio = fine > 0.0 ? coarse / fine : 1.0;
    c.pass = std::fabs(coarse - fine) <= 1e-3 * std::max(fine, 1e-2);
    if (!c.pass) c.detail = "grid refinement moved the result by more than 0.1%";
    return c;
  });
}

std::vector<VerifyCase> RunAllSuites(const VerifyOptions& options) {
  std::vector<VerifyCase> all;
  for (auto* suite : {&GaussianClosedFormSuite, &PaiRandomSuite, &PaiIdentityTightnessSuite,
                      &ShiftReductionSuite, &DataProcessingSuite, &PropagateMomentsSuite,
                      &GridDoublingSuite}) {
    std::vector<VerifyCase> cases = (*suite)(options);
    all.insert(all.end(), cases.begin(), cases.end());
  }
  return all;
}

bool AllPass(std::span<const VerifyCase> cases) {
  for (const VerifyCase& c : cases) {
    if (!c.pass) return false;
  }
  return true;
}

void WriteJsonLines(std::span<const VerifyCase> cases, std::ostream& out) {
  for (const VerifyCase& c : cases) {
    nlohmann::json row;
    row["suite"] = c.suite;
    row["case"] = c.name;
    row["oracle"] = c.oracle;
    row["bound"] = c.bound;
    row["ratio"] = c.ratio;
    row["pass"] = c.pass;
    if (!c.detail.empty()) row["detail"] = c.detail;
    out << row.dump() << '\n';
  }
}

}  // namespace pai
