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

#include "pai/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pai/convex.h"
#include "pai/loss.h"
#include "pai/rng.h"
#include "pai/sgd.h"
#include "pai/smoothing.h"

namespace pai {
namespace {

std::string Fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

uint64_t DeriveRunSeed(uint64_t seed, uint64_t trial, uint64_t task) {
  return CounterRng(seed, Stream::kData, 0xA11CE, trial * 65536 + task).NextRaw();
}

Vector UnitAxis(int d, int axis = 0) {
  Vector v = Vector::Zero(d);
  v[axis % d] = 1.0;
  return v;
}

// Uniform direction on the unit sphere.
Vector RandomUnit(int d, CounterRng& rng) {
  Vector v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.NextGaussian();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

// Synthetic regression population: x uniform on the unit sphere,
// y = <w*, x> + xi with xi ~ U(-s, s), so E[x x^T] = I/d and the
// least-squares excess population loss is ||w - w*||^2 / (2d) exactly.
struct LeastSquaresTask {
  int d;
  double radius;
  Vector w_star;
  double noise_halfwidth;

  LeastSquaresTask(int d_in, double radius_in, const Vector& direction)
      : d(d_in), radius(radius_in), w_star(0.5 * radius_in * direction),
        noise_halfwidth(0.5 * radius_in) {}

  double lipschitz() const { return 2.0 * radius + noise_halfwidth; }

  Example Draw(CounterRng& rng) const {
    const Vector x = RandomUnit(d, rng);
    const double xi = noise_halfwidth * (2.0 * rng.NextUniform() - 1.0);
    return Example(x, w_star.dot(x) + xi);
  }

  double Excess(const Vector& w) const { return (w - w_star).squaredNorm() / (2.0 * d); }
};

// Classification population for the logistic task: y = +-1 with
// P(y=1|x) = sigmoid(margin_scale * <w_ref, x>). No closed-form optimum;
// excess loss is estimated on a seeded holdout against a full-batch
// projected-gradient solve.
struct LogisticTask {
  int d;
  double radius;
  Vector w_ref;
  static constexpr double kMarginScale = 4.0;

  LogisticTask(int d_in, double radius_in)
      : d(d_in), radius(radius_in), w_ref(2.0 * UnitAxis(d_in)) {}

  Example Draw(CounterRng& rng) const {
    const Vector x = RandomUnit(d, rng);
    const double p = 1.0 / (1.0 + std::exp(-kMarginScale * w_ref.dot(x)));
    const double y = rng.NextUniform() <= p ? 1.0 : -1.0;
    return Example(x, y);
  }
};

// 1-D hinge classification with x in {-1, +1}: for |w| <= R <= 1 the
// population hinge loss is linear, F(w) = 1 + w (p_minus - p_plus), so the
// excess loss has a closed form.
struct HingeTask {
  double radius;
  double w_star = 0.25;
  double noise_halfwidth = 0.5;

  explicit HingeTask(double radius_in) : radius(radius_in) {}

  double PPlus() const {
    return std::clamp((noise_halfwidth + w_star) / (2.0 * noise_halfwidth), 0.0, 1.0);
  }
  double PMinus() const {
    return std::clamp((noise_halfwidth - w_star) / (2.0 * noise_halfwidth), 0.0, 1.0);
  }

  Example Draw(CounterRng& rng) const {
    const double x = rng.NextBelow(2) == 0 ? -1.0 : 1.0;
    const double xi = noise_halfwidth * (2.0 * rng.NextUniform() - 1.0);
    Vector f(1);
    f[0] = x;
    return Example(f, w_star * x + xi >= 0.0 ? 1.0 : -1.0);
  }

  double Excess(const Vector& w) const {
    const double slope = PPlus() - PMinus();  // > 0 for w_star > 0
    return slope * (radius - w[0]);
  }
};

struct Aggregate {
  double mean = 0.0;
  double std_error = 0.0;
};

Aggregate Aggregate30(const std::vector<double>& values) {
  const size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Runs `trials` independent jobs over a small thread pool; results land in
// trial order so aggregation is schedule-independent.
template <typename Fn>
std::vector<double> ParallelTrials(int trials, Fn&& job) {
  std::vector<double> out(trials, 0.0);
  const int workers =
      std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), trials));
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&out, &job, w, workers, trials]() {
      for (int t = w; t < trials; t += workers) out[t] = job(t);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

void RequireTrials(const ExperimentConfig& cfg) {
  if (cfg.trials < 30) {
    throw std::invalid_argument(
        "experiments: headline numbers need standard errors from >= 30 trials");
  }
}

void RequireEpsilonDelta(const ExperimentConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("experiments: epsilon must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("experiments: delta must lie in (0,1)");
  }
}

void RequireContractive(double eta, double beta, const char* hypothesis_hint) {
  if (eta > 2.0 / beta) {
    std::ostringstream msg;
    msg << "experiments: eta = " << eta << " violates eta <= 2/beta = " << 2.0 / beta
        << " (" << hypothesis_hint << ")";
    throw std::invalid_argument(msg.str());
  }
}

SgdResult RunVariant(Variant variant, std::span<const Example> data, const LossFamily& loss,
                     const ConvexSet& set, const SgdRunConfig& run) {
  switch (variant) {
    case Variant::kPnsgd:
      return Pnsgd(data, loss, set, run);
    case Variant::kSkip:
      return SkipPnsgd(data, loss, set, run);
    case Variant::kStop:
      return StopPnsgd(data, loss, set, run);
    case Variant::kPnmsgd:
      return Pnmsgd(data, loss, set, run);
  }
  throw std::logic_error("RunVariant: unknown variant");
}

double CertifiedLocalEps(double lipschitz, double sigma, double delta) {
  const std::vector<double> grid = DefaultAlphaGrid();
  return TightestDp(
             [&](double alpha) {
               return 2.0 * alpha * lipschitz * lipschitz / (sigma * sigma);
             },
             delta, grid)
      .epsilon;
}

double CertifiedIndexEps(const SgdPrivacyConfig& privacy, int index, double delta) {
  const std::vector<double> grid = DefaultAlphaGrid();
  return TightestDp(
             [&](double alpha) {
               return SkipPnsgdRdp(privacy, index, RenyiOrder(alpha)).epsilon;
             },
             delta, grid)
      .epsilon;
}

// Full-batch projected gradient descent on the empirical loss; used only to
// locate a reference optimum for tasks without a closed-form F*.
Vector EmpiricalSolve(std::span<const Example> data, const LossFamily& loss,
                      const ConvexSet& set, int iters, double eta) {
  Vector w = Vector::Zero(set.dim());
  Vector g(set.dim());
  for (int it = 0; it < iters; ++it) {
    g.setZero();
    for (const Example& x : data) g += loss.Gradient(w, x);
    w = set.Project(w - (eta / static_cast<double>(data.size())) * g);
  }
  return w;
}

double EmpiricalLoss(const Vector& w, std::span<const Example> data, const LossFamily& loss) {
  double total = 0.0;
  for (const Example& x : data) total += loss.Value(w, x);
  return total / static_cast<double>(data.size());
}

}  // namespace

std::string TaskName(Task task) {
  switch (task) {
    case Task::kLeastSquares:
      return "least-squares";
    case Task::kLogistic:
      return "logistic";
    case Task::kHingeSmoothed:
      return "hinge-smoothed";
    case Task::kConstant:
      return "constant";
  }
  return "?";
}

std::string VariantName(Variant variant) {
  switch (variant) {
    case Variant::kPnsgd:
      return "pnsgd";
    case Variant::kSkip:
      return "skip";
    case Variant::kStop:
      return "stop";
    case Variant::kPnmsgd:
      return "pnmsgd";
  }
  return "?";
}

Task ParseTask(const std::string& name) {
  if (name == "least-squares") return Task::kLeastSquares;
  if (name == "logistic") return Task::kLogistic;
  if (name == "hinge-smoothed") return Task::kHingeSmoothed;
  if (name == "constant") return Task::kConstant;
  throw std::invalid_argument("unknown task: " + name);
}

Variant ParseVariant(const std::string& name) {
  if (name == "pnsgd") return Variant::kPnsgd;
  if (name == "skip") return Variant::kSkip;
  if (name == "stop") return Variant::kStop;
  if (name == "pnmsgd") return Variant::kPnmsgd;
  throw std::invalid_argument("unknown variant: " + name);
}

namespace {

struct PreparedRun {
  std::shared_ptr<const LossFamily> loss;
  ConvexSet set;
  double lipschitz;
  // Per-trial excess loss of the final iterate.
  std::function<double(int trial, Variant variant, double eta, double sigma)> run_trial;
};

PreparedRun PrepareLeastSquares(const ExperimentConfig& cfg) {
  const auto task = std::make_shared<LeastSquaresTask>(cfg.d, cfg.radius, UnitAxis(cfg.d));
  // An explicit L override becomes the clipping level, so the declared
  // constant is enforced by the family itself, not assumed.
  const double clip = cfg.lipschitz > 0.0 ? cfg.lipschitz : task->lipschitz();
  auto loss = std::make_shared<ClippedSquaredLoss>(cfg.d, 1.0, clip);
  ConvexSet set = ConvexSet::Ball(cfg.radius, cfg.d);
  PreparedRun prep{loss, set, clip, nullptr};
  const int n = cfg.n;
  const uint64_t seed = cfg.seed;
  prep.run_trial = [task, loss, set, n, seed](int trial, Variant variant, double eta,
                                              double sigma) {
    CounterRng data_rng(seed, Stream::kData, static_cast<uint64_t>(trial));
    std::vector<Example> data;
    data.reserve(n);
    for (int i = 0; i < n; ++i) data.push_back(task->Draw(data_rng));
    SgdRunConfig run;
    run.eta = eta;
    run.sigma = sigma;
    run.w0 = Vector::Zero(task->d);
    run.seed = DeriveRunSeed(seed, static_cast<uint64_t>(trial), 0);
    return task->Excess(RunVariant(variant, data, *loss, set, run).w);
  };
  return prep;
}

PreparedRun PrepareLogistic(const ExperimentConfig& cfg) {
  const auto task = std::make_shared<LogisticTask>(cfg.d, cfg.radius);
  auto loss = std::make_shared<LogisticLoss>(cfg.d, 1.0);
  if (cfg.lipschitz > 0.0 && cfg.lipschitz < loss->lipschitz()) {
    throw std::invalid_argument(
        "experiments: the logistic family's gradients are not clipped, so a "
        "declared L below the honest constant (the feature-norm bound) would "
        "overstate privacy");
  }
  ConvexSet set = ConvexSet::Ball(cfg.radius, cfg.d);

  // Shared holdout and reference optimum for excess-loss estimation.
  constexpr int kHoldout = 20000;
  auto holdout = std::make_shared<std::vector<Example>>();
  holdout->reserve(kHoldout);
  CounterRng holdout_rng(cfg.seed, Stream::kData, 0xB01D, 0);
  for (int i = 0; i < kHoldout; ++i) holdout->push_back(task->Draw(holdout_rng));
  const Vector w_ref = EmpiricalSolve(*holdout, *loss, set, 400, 2.0 * cfg.radius);
  const double f_ref = EmpiricalLoss(w_ref, *holdout, *loss);

  PreparedRun prep{loss, set,
                   cfg.lipschitz > 0.0 ? cfg.lipschitz : loss->lipschitz(), nullptr};
  const int n = cfg.n;
  const uint64_t seed = cfg.seed;
  prep.run_trial = [task, loss, set, holdout, f_ref, n, seed](int trial, Variant variant,
                                                              double eta, double sigma) {
    CounterRng data_rng(seed, Stream::kData, static_cast<uint64_t>(trial));
    std::vector<Example> data;
    data.reserve(n);
    for (int i = 0; i < n; ++i) data.push_back(task->Draw(data_rng));
    SgdRunConfig run;
    run.eta = eta;
    run.sigma = sigma;
    run.w0 = Vector::Zero(task->d);
    run.seed = DeriveRunSeed(seed, static_cast<uint64_t>(trial), 0);
    const Vector w = RunVariant(variant, data, *loss, set, run).w;
    return EmpiricalLoss(w, *holdout, *loss) - f_ref;
  };
  return prep;
}

// Constant loss: the gradient is zero, every output is optimal, excess is 0.
PreparedRun PrepareConstant(const ExperimentConfig& cfg) {
  auto loss = std::make_shared<ZeroLoss>(cfg.d);
  ConvexSet set = ConvexSet::Ball(cfg.radius, cfg.d);
  // The zero gradient is L-Lipschitz for any declared L > 0.
  PreparedRun prep{loss, set, cfg.lipschitz > 0.0 ? cfg.lipschitz : 1.0, nullptr};
  const int n = cfg.n;
  const uint64_t seed = cfg.seed;
  const int d = cfg.d;
  prep.run_trial = [loss, set, n, d, seed](int trial, Variant variant, double eta,
                                           double sigma) {
    CounterRng data_rng(seed, Stream::kData, static_cast<uint64_t>(trial));
    std::vector<Example> data;
    data.reserve(n);
    for (int i = 0; i < n; ++i) data.push_back(Example(RandomUnit(d, data_rng), 0.0));
    SgdRunConfig run;
    run.eta = eta;
    run.sigma = sigma;
    run.w0 = Vector::Zero(d);
    run.seed = DeriveRunSeed(seed, static_cast<uint64_t>(trial), 0);
    RunVariant(variant, data, *loss, set, run);
    return 0.0;
  };
  return prep;
}

PreparedRun PrepareTask(const ExperimentConfig& cfg) {
  switch (cfg.task) {
    case Task::kLeastSquares:
      return PrepareLeastSquares(cfg);
    case Task::kLogistic:
      return PrepareLogistic(cfg);
    case Task::kConstant:
      return PrepareConstant(cfg);
    case Task::kHingeSmoothed:
      throw std::invalid_argument(
          "experiments: the hinge-smoothed task runs through `run smoothing`");
  }
  throw std::logic_error("PrepareTask: unknown task");
}

ResultRow FinishRow(ResultRow row, const std::vector<double>& excesses,
                    std::chrono::steady_clock::time_point start) {
  const Aggregate agg = Aggregate30(excesses);
  row.mean_excess = agg.mean;
  row.std_error = agg.std_error;
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!row.cfg.output_path.empty()) AppendCsv(row, row.cfg.output_path);
  return row;
}

void AssertWithinBound(const ResultRow& row, const char* experiment) {
  if (row.mean_excess > row.bound + 3.0 * row.std_error) {
    std::ostringstream msg;
    msg << experiment << ": measured mean excess loss " << row.mean_excess
        << " exceeds the bound " << row.bound << " + 3*SE";
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

ResultRow RunBaseline(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RequireTrials(cfg);
  RequireEpsilonDelta(cfg);
  PreparedRun prep = PrepareTask(cfg);
  const double L = prep.lipschitz;
  const double A = std::log(1.25 / cfg.delta);
  const double sigma = 2.0 * L * std::sqrt(2.0 * A) / cfg.epsilon;
  const double eta =
      2.0 * cfg.radius / std::sqrt(cfg.n * (L * L + cfg.d * sigma * sigma));

  ResultRow row;
  row.experiment = "baseline";
  row.cfg = cfg;
  row.cfg.variant = Variant::kStop;  // random stopping is what the guarantee covers
  row.cfg.lipschitz = L;
  row.sigma = sigma;
  row.eta = eta;
  row.baseline_term = 4.0 * cfg.radius * L / std::sqrt(static_cast<double>(cfg.n));
  row.bound = row.baseline_term *
              std::sqrt(1.0 + 8.0 * cfg.d * A / (cfg.epsilon * cfg.epsilon));
  row.privacy.kind = "local";
  row.privacy.delta = cfg.delta;
  row.privacy.eps_nominal = cfg.epsilon;
  row.privacy.eps_certified = CertifiedLocalEps(L, sigma, cfg.delta);

  const std::vector<double> excesses = ParallelTrials(cfg.trials, [&](int trial) {
    return prep.run_trial(trial, Variant::kStop, eta, sigma);
  });
  ResultRow done = FinishRow(std::move(row), excesses, start);
  AssertWithinBound(done, "baseline");
  return done;
}

ResultRow RunPerPerson(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RequireTrials(cfg);
  RequireEpsilonDelta(cfg);
  PreparedRun prep = PrepareTask(cfg);
  const double L = prep.lipschitz;
  const double beta = prep.loss->smoothness();
  const double A = std::log(1.25 / cfg.delta);
  const double sigma = 2.0 * L * std::sqrt(2.0 * A) / cfg.epsilon;
  const double eta = std::sqrt(8.0) * cfg.radius /
                     std::sqrt(cfg.n * (L * L + cfg.d * sigma * sigma));
  RequireContractive(eta, beta, "per-person guarantee needs contractive gradient steps");

  ResultRow row;
  row.experiment = "per-person";
  row.cfg = cfg;
  row.cfg.variant = Variant::kSkip;
  row.cfg.lipschitz = L;
  row.sigma = sigma;
  row.eta = eta;
  row.baseline_term =
      4.0 * std::sqrt(2.0) * cfg.radius * L / std::sqrt(static_cast<double>(cfg.n));
  row.bound = row.baseline_term *
              std::sqrt(1.0 + 8.0 * cfg.d * A / (cfg.epsilon * cfg.epsilon));
  row.privacy.kind = "per_index";
  row.privacy.delta = cfg.delta;
  row.privacy.eps_nominal = cfg.epsilon;  // at the last index
  const SgdPrivacyConfig privacy(cfg.n, L, sigma, eta, beta);
  row.privacy.eps_certified = CertifiedIndexEps(privacy, cfg.n, cfg.delta);
  for (int t : {1, (cfg.n + 3) / 4, (cfg.n + 1) / 2, (3 * cfg.n + 3) / 4, cfg.n}) {
    PrivacyEntry entry;
    entry.index = t;
    entry.nominal = cfg.epsilon / std::sqrt(static_cast<double>(cfg.n - t + 1));
    entry.certified = CertifiedIndexEps(privacy, t, cfg.delta);
    row.privacy.per_index.push_back(entry);
  }
  for (size_t i = 1; i < row.privacy.per_index.size(); ++i) {
    if (row.privacy.per_index[i].nominal < row.privacy.per_index[i - 1].nominal) {
      throw std::logic_error("per-person: privacy table must be monotone in the index");
    }
  }

  const std::vector<double> excesses = ParallelTrials(cfg.trials, [&](int trial) {
    return prep.run_trial(trial, Variant::kSkip, eta, sigma);
  });
  ResultRow done = FinishRow(std::move(row), excesses, start);
  AssertWithinBound(done, "per-person");
  return done;
}

ResultRow RunPublicPrivate(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RequireTrials(cfg);
  RequireEpsilonDelta(cfg);
  if (cfg.m_public < 1 || cfg.m_public >= cfg.n) {
    throw std::invalid_argument(
        "public-private: need 1 <= m_public < n (with no public data, use per-person)");
  }
  PreparedRun prep = PrepareTask(cfg);
  const double L = prep.lipschitz;
  const double beta = prep.loss->smoothness();
  const double A = std::log(1.25 / cfg.delta);
  const int m = cfg.m_public;
  const double sigma = 2.0 * L * std::sqrt(A / m) / cfg.epsilon;
  const double eta = std::sqrt(8.0) * cfg.radius /
                     std::sqrt(cfg.n * (L * L + cfg.d * sigma * sigma));
  RequireContractive(eta, beta, "public-private guarantee needs contractive gradient steps");

  ResultRow row;
  row.experiment = "public-private";
  row.cfg = cfg;
  row.cfg.variant = Variant::kSkip;
  row.cfg.lipschitz = L;
  row.sigma = sigma;
  row.eta = eta;
  row.baseline_term =
      4.0 * std::sqrt(2.0) * cfg.radius * L / std::sqrt(static_cast<double>(cfg.n));
  row.bound =
      row.baseline_term * std::sqrt(1.0 + 8.0 * cfg.d * A / (m * cfg.epsilon * cfg.epsilon));
  // The public examples sit at the end of the sequence; privacy is reported
  // for private indices only, and the guarantee at index n-m dominates.
  row.privacy.kind = "per_index";
  row.privacy.delta = cfg.delta;
  row.privacy.eps_nominal = cfg.epsilon;
  const SgdPrivacyConfig privacy(cfg.n, L, sigma, eta, beta);
  const int last_private = cfg.n - m;
  for (int t : {1, (last_private + 1) / 2, last_private}) {
    if (t < 1) continue;
    PrivacyEntry entry;
    entry.index = t;
    entry.nominal = cfg.epsilon * std::sqrt(static_cast<double>(m + 1) /
                                            static_cast<double>(cfg.n - t + 1));
    entry.certified = CertifiedIndexEps(privacy, t, cfg.delta);
    row.privacy.per_index.push_back(entry);
  }
  row.privacy.eps_certified = row.privacy.per_index.back().certified;
  for (const PrivacyEntry& entry : row.privacy.per_index) {
    if (entry.certified > row.privacy.eps_certified + 1e-12) {
      throw std::logic_error(
          "public-private: the index-(n-m) guarantee must dominate the private table");
    }
  }

  const std::vector<double> excesses = ParallelTrials(cfg.trials, [&](int trial) {
    return prep.run_trial(trial, Variant::kSkip, eta, sigma);
  });
  ResultRow done = FinishRow(std::move(row), excesses, start);
  AssertWithinBound(done, "public-private");
  return done;
}

ResultRow RunMultitask(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RequireTrials(cfg);
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw std::invalid_argument("multitask: epsilon must lie in (0,1)");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 0.5)) {
    throw std::invalid_argument("multitask: delta must lie in (0,1/2)");
  }
  if (cfg.task != Task::kLeastSquares) {
    throw std::invalid_argument("multitask: only the least-squares task is wired up");
  }
  const double L_default = LeastSquaresTask(cfg.d, cfg.radius, UnitAxis(cfg.d)).lipschitz();
  const double L = cfg.lipschitz > 0.0 ? cfg.lipschitz : L_default;
  const MultitaskParams params =
      MultitaskDp(cfg.n, cfg.k, L, cfg.radius, cfg.d, cfg.epsilon, cfg.delta);
  const double beta = 1.0;  // unit feature norms
  RequireContractive(params.eta, beta, "multitask guarantee needs contractive gradient steps");

  const double log_inv_delta = std::log(1.0 / cfg.delta);
  const double k_independent_limit =
      static_cast<double>(cfg.n) / (std::log(static_cast<double>(cfg.n)) * log_inv_delta);
  if (cfg.k <= k_independent_limit &&
      params.q != 2.0 * log_inv_delta) {
    throw std::logic_error("multitask: q must sit on the 2 ln(1/delta) branch for small k");
  }

  ResultRow row;
  row.experiment = "multitask";
  row.cfg = cfg;
  row.cfg.variant = Variant::kStop;
  row.cfg.lipschitz = L;
  row.sigma = params.sigma;
  row.eta = params.eta;
  row.baseline_term = 4.0 * cfg.radius * L / std::sqrt(static_cast<double>(cfg.n));
  row.bound = row.baseline_term *
              std::sqrt(1.0 + 16.0 * cfg.d * params.q * log_inv_delta /
                                  (cfg.epsilon * cfg.epsilon));
  row.privacy.kind = "composed";
  row.privacy.delta = cfg.delta;
  row.privacy.eps_nominal = cfg.epsilon;
  row.privacy.eps_certified = params.certified.epsilon;

  // k independent targets on shared features; per-task excess is exact.
  std::vector<LeastSquaresTask> tasks;
  tasks.reserve(cfg.k);
  for (int task_id = 0; task_id < cfg.k; ++task_id) {
    CounterRng dir_rng(cfg.seed, Stream::kData, 0xD1F, static_cast<uint64_t>(task_id));
    tasks.emplace_back(cfg.d, cfg.radius, RandomUnit(cfg.d, dir_rng));
  }
  const ClippedSquaredLoss loss(cfg.d, 1.0, L);
  const ConvexSet set = ConvexSet::Ball(cfg.radius, cfg.d);

  double worst_mean = 0.0, worst_se = 0.0;
  for (int task_id = 0; task_id < cfg.k; ++task_id) {
    const LeastSquaresTask& task = tasks[task_id];
    const std::vector<double> excesses = ParallelTrials(cfg.trials, [&](int trial) {
      CounterRng data_rng(cfg.seed, Stream::kData, static_cast<uint64_t>(trial),
                          static_cast<uint64_t>(task_id));
      std::vector<Example> data;
      data.reserve(cfg.n);
      for (int i = 0; i < cfg.n; ++i) data.push_back(task.Draw(data_rng));
      SgdRunConfig run;
      run.eta = params.eta;
      run.sigma = params.sigma;
      run.w0 = Vector::Zero(cfg.d);
      run.seed = DeriveRunSeed(cfg.seed, static_cast<uint64_t>(trial),
                               static_cast<uint64_t>(task_id) + 1);
      return task.Excess(StopPnsgd(data, loss, set, run).w);
    });
    const Aggregate agg = Aggregate30(excesses);
    if (agg.mean > worst_mean) {
      worst_mean = agg.mean;
      worst_se = agg.std_error;
    }
  }
  row.mean_excess = worst_mean;
  row.std_error = worst_se;
  if (row.mean_excess > row.bound + 3.0 * row.std_error) {
    row.warnings.push_back("max-over-tasks excess exceeded the bound");
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!row.cfg.output_path.empty()) AppendCsv(row, row.cfg.output_path);
  return row;
}

ResultRow RunSmoothing(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RequireTrials(cfg);
  RequireEpsilonDelta(cfg);

  ResultRow row;
  row.experiment = "smoothing";
  row.cfg = cfg;
  row.cfg.variant = Variant::kSkip;

  const double A = std::log(1.25 / cfg.delta);
  const double lambda_formula = LambdaFor(cfg.radius, cfg.epsilon, cfg.n, cfg.delta);
  const double lambda = cfg.lambda_override > 0.0 ? cfg.lambda_override : lambda_formula;
  row.lambda = lambda;

  std::shared_ptr<const LossFamily> base;
  ConvexSet set = ConvexSet::Ball(cfg.radius, std::max(cfg.d, 1));
  std::function<double(const Vector&)> excess_of;
  double L = 0.0;
  if (cfg.task == Task::kHingeSmoothed) {
    if (cfg.d != 1) {
      throw std::invalid_argument(
          "smoothing: the hinge task's closed-form population loss needs d = 1");
    }
    if (cfg.radius > 1.0) {
      throw std::invalid_argument(
          "smoothing: the hinge task needs R <= 1 so population margins stay linear");
    }
    if (cfg.lipschitz > 0.0 && cfg.lipschitz < 1.0) {
      throw std::invalid_argument(
          "smoothing: hinge subgradients have norm up to the feature bound (1); a "
          "smaller declared L would overstate privacy");
    }
    auto task = std::make_shared<HingeTask>(cfg.radius);
    base = std::make_shared<HingeLoss>(1, 1.0);
    L = cfg.lipschitz > 0.0 ? cfg.lipschitz : 1.0;
    excess_of = [task](const Vector& w) { return task->Excess(w); };
  } else if (cfg.task == Task::kLeastSquares) {
    auto task = std::make_shared<LeastSquaresTask>(cfg.d, cfg.radius, UnitAxis(cfg.d));
    L = cfg.lipschitz > 0.0 ? cfg.lipschitz : task->lipschitz();
    base = std::make_shared<ClippedSquaredLoss>(cfg.d, 1.0, L);
    excess_of = [task](const Vector& w) { return task->Excess(w); };
    row.warnings.push_back("base task is already smooth; smoothing only adds error");
  } else {
    throw std::invalid_argument("smoothing: supported tasks are hinge-smoothed and least-squares");
  }
  if (lambda > 2.0 * lambda_formula) {
    row.warnings.push_back("large smoothing width degrades loss measurably (value gap up to " +
                           Fmt(ApproximationGapBound(L, lambda, cfg.d)) + ")");
  }

  const double sigma = 2.0 * L * std::sqrt(2.0 * A) / cfg.epsilon;
  const double eta = std::sqrt(8.0) * cfg.radius /
                     std::sqrt(cfg.n * (L * L + cfg.d * sigma * sigma));
  const double beta = L / lambda;
  if (cfg.lambda_override == 0.0 && eta > 2.0 / beta) {
    // The formula lambda always satisfies this; anything else is a logic bug.
    throw std::logic_error("smoothing: formula lambda failed eta <= 2 lambda / L");
  }
  if (eta > 2.0 / beta) {
    throw std::invalid_argument("smoothing: lambda override too small, eta > 2 lambda / L");
  }

  row.cfg.lipschitz = L;
  row.sigma = sigma;
  row.eta = eta;
  row.baseline_term =
      4.0 * std::sqrt(2.0) * cfg.radius * L / std::sqrt(static_cast<double>(cfg.n));
  row.bound = row.baseline_term *
              (std::sqrt(1.0 + 8.0 * cfg.d * A / (cfg.epsilon * cfg.epsilon)) +
               cfg.epsilon * std::sqrt(static_cast<double>(cfg.d)) / (2.0 * A));
  row.privacy.kind = "per_index";
  row.privacy.delta = cfg.delta;
  row.privacy.eps_nominal = cfg.epsilon;
  const SgdPrivacyConfig privacy(cfg.n, L, sigma, eta, beta);
  row.privacy.eps_certified = CertifiedIndexEps(privacy, cfg.n, cfg.delta);

  auto smoothed = std::make_shared<SmoothedLoss>(base, set, lambda, 1);
  HingeTask hinge_task(cfg.radius);
  LeastSquaresTask ls_task(cfg.d, cfg.radius, UnitAxis(cfg.d));
  const bool is_hinge = cfg.task == Task::kHingeSmoothed;
  const std::vector<double> excesses = ParallelTrials(cfg.trials, [&](int trial) {
    CounterRng data_rng(cfg.seed, Stream::kData, static_cast<uint64_t>(trial));
    std::vector<Example> data;
    data.reserve(cfg.n);
    for (int i = 0; i < cfg.n; ++i) {
      data.push_back(is_hinge ? hinge_task.Draw(data_rng) : ls_task.Draw(data_rng));
    }
    SgdRunConfig run;
    run.eta = eta;
    run.sigma = sigma;
    run.w0 = Vector::Zero(set.dim());
    run.seed = DeriveRunSeed(cfg.seed, static_cast<uint64_t>(trial), 0);
    const Vector w = SkipPnsgd(data, *smoothed, set, run).w;
    return excess_of(w);
  });
  ResultRow done = FinishRow(std::move(row), excesses, start);
  if (done.mean_excess > done.bound + 3.0 * done.std_error) {
    done.warnings.push_back("measured excess exceeded the two-term bound");
  }
  return done;
}

ResultRow RunExperiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "baseline") return RunBaseline(cfg);
  if (name == "per-person") return RunPerPerson(cfg);
  if (name == "public-private") return RunPublicPrivate(cfg);
  if (name == "multitask") return RunMultitask(cfg);
  if (name == "smoothing") return RunSmoothing(cfg);
  throw std::invalid_argument("unknown experiment: " + name);
}

namespace {

constexpr int kPrivacySlots = 5;

}  // namespace

std::string CsvHeader() {
  std::string header =
      "schema,experiment,task,variant,n,d,k,m_public,trials,seed,R,L,epsilon,delta,"
      "sigma,eta,lambda,mean_excess_loss,std_error,bound,baseline_term,privacy_kind,"
      "eps_nominal,eps_certified,delta_param";
  for (int i = 1; i <= kPrivacySlots; ++i) {
    const std::string s = std::to_string(i);
    header += ",priv_index_" + s + ",priv_nominal_" + s + ",priv_certified_" + s;
  }
  header += ",warnings";
  return header;
}

std::string CsvLine(const ResultRow& row) {
  std::ostringstream out;
  out << "pai.v1," << row.experiment << ',' << TaskName(row.cfg.task) << ','
      << VariantName(row.cfg.variant) << ',' << row.cfg.n << ',' << row.cfg.d << ','
      << row.cfg.k << ',' << row.cfg.m_public << ',' << row.cfg.trials << ','
      << row.cfg.seed << ',' << Fmt(row.cfg.radius) << ',' << Fmt(row.cfg.lipschitz) << ','
      << Fmt(row.cfg.epsilon) << ',' << Fmt(row.cfg.delta) << ',' << Fmt(row.sigma) << ','
      << Fmt(row.eta) << ',' << Fmt(row.lambda) << ',' << Fmt(row.mean_excess) << ','
      << Fmt(row.std_error) << ',' << Fmt(row.bound) << ',' << Fmt(row.baseline_term) << ','
      << row.privacy.kind << ',' << Fmt(row.privacy.eps_nominal) << ','
      << Fmt(row.privacy.eps_certified) << ',' << Fmt(row.privacy.delta);
  for (int i = 0; i < kPrivacySlots; ++i) {
    if (i < static_cast<int>(row.privacy.per_index.size())) {
      const PrivacyEntry& e = row.privacy.per_index[i];
      out << ',' << e.index << ',' << Fmt(e.nominal) << ',' << Fmt(e.certified);
    } else {
      out << ",,,";
    }
  }
  out << ',';
  for (size_t i = 0; i < row.warnings.size(); ++i) {
    if (i > 0) out << ';';
    out << row.warnings[i];
  }
  return out.str();
}

void AppendCsv(const ResultRow& row, const std::string& path) {
  const bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("AppendCsv: cannot open " + path);
  if (fresh) out << CsvHeader() << '\n';
  out << CsvLine(row) << '\n';
}

void ApplyConfigFile(const std::string& path, ExperimentConfig* cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ApplyConfigFile: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      const size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (key == "task") cfg->task = ParseTask(value);
    else if (key == "variant") cfg->variant = ParseVariant(value);
    else if (key == "n") cfg->n = std::stoi(value);
    else if (key == "d") cfg->d = std::stoi(value);
    else if (key == "k") cfg->k = std::stoi(value);
    else if (key == "m_public") cfg->m_public = std::stoi(value);
    else if (key == "trials") cfg->trials = std::stoi(value);
    else if (key == "R") cfg->radius = std::stod(value);
    else if (key == "L") cfg->lipschitz = std::stod(value);
    else if (key == "epsilon") cfg->epsilon = std::stod(value);
    else if (key == "delta") cfg->delta = std::stod(value);
    else if (key == "seed") cfg->seed = std::stoull(value);
    else if (key == "lambda") cfg->lambda_override = std::stod(value);
    else if (key == "out") cfg->output_path = value;
    else {
      throw std::runtime_error("ApplyConfigFile: unknown key '" + key + "' at line " +
                               std::to_string(lineno));
    }
  }
}

std::string ResolveOutputPath(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("PAI_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0' || path.front() == '/') return path;
  std::string joined(dir);
  if (!joined.empty() && joined.back() != '/') joined += '/';
  return joined + path;
}

std::string Summary(const ResultRow& row) {
  std::ostringstream out;
  out.precision(6);
  out << row.experiment << " task=" << TaskName(row.cfg.task)
      << " variant=" << VariantName(row.cfg.variant) << " n=" << row.cfg.n
      << " d=" << row.cfg.d;
  if (row.cfg.k > 1) out << " k=" << row.cfg.k;
  if (row.cfg.m_public > 0) out << " m_public=" << row.cfg.m_public;
  out << " trials=" << row.cfg.trials << "\n"
      << "  sigma=" << row.sigma << " eta=" << row.eta;
  if (row.lambda > 0.0) out << " lambda=" << row.lambda;
  out << "\n  mean excess loss = " << row.mean_excess << " (SE " << row.std_error
      << "), bound = " << row.bound << "\n"
      << "  privacy (" << row.privacy.kind << "): nominal eps = " << row.privacy.eps_nominal
      << ", certified eps = " << row.privacy.eps_certified
      << " at delta = " << row.privacy.delta << "\n";
  for (const PrivacyEntry& e : row.privacy.per_index) {
    out << "    index " << e.index << ": nominal " << e.nominal << ", certified "
        << e.certified << "\n";
  }
  for (const std::string& w : row.warnings) out << "  warning: " << w << "\n";
  out << "  wall time " << row.wall_seconds << " s\n";
  return out.str();
}

}  // namespace pai
