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

#include "pai/sgd.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pai {
namespace {

void CheckRun(std::span<const Example> data, const LossFamily& loss, const ConvexSet& set,
              const SgdRunConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("sgd: need at least one example");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("sgd: eta must be > 0");
  if (cfg.sigma < 0.0) throw std::invalid_argument("sgd: sigma must be >= 0");
  if (cfg.w0.size() != set.dim() || loss.dim() != set.dim()) {
    throw std::invalid_argument("sgd: dimension mismatch between w0, loss, and set");
  }
  for (const Example& x : data) {
    if (x.features.size() != set.dim()) {
      throw std::invalid_argument("sgd: example dimension mismatch");
    }
  }
}

// Core loop shared by all variants. step_offset shifts the noise substream
// so multi-epoch runs keep one substream per global step.
SgdResult RunPnsgd(std::span<const Example> data, const LossFamily& loss,
                   const ConvexSet& set, const SgdRunConfig& cfg, uint64_t step_offset = 0) {
  const int d = set.dim();
  SgdResult result;
  Vector w = set.Contains(cfg.w0) ? cfg.w0 : set.Project(cfg.w0);
  Vector z(d);
  for (size_t t = 0; t < data.size(); ++t) {
    CounterRng noise_rng(cfg.seed, Stream::kNoise, step_offset + t);
    CounterRng smoothing_rng(cfg.seed, Stream::kSmoothing, step_offset + t);
    const Vector g = loss.Gradient(w, data[t], loss.is_stochastic() ? &smoothing_rng : nullptr);
    for (int i = 0; i < d; ++i) z[i] = noise_rng.NextGaussian();
    const Vector v = w - cfg.eta * (g + cfg.sigma * z);
    w = set.Project(v);
    if (cfg.check_feasibility && !set.Contains(w, 1e-9)) {
      throw std::logic_error("sgd: iterate left the feasible set");
    }
    if (cfg.observer) cfg.observer(static_cast<int>(t), w);
    result.gaussian_draws += noise_rng.gaussian_draws();
    result.smoothing_draws += smoothing_rng.gaussian_draws();
  }
  result.w = std::move(w);
  result.steps = static_cast<int>(data.size());
  result.amplification_valid = loss.is_smooth() && cfg.eta <= 2.0 / loss.smoothness();
  return result;
}

}  // namespace

SgdResult Pnsgd(std::span<const Example> data, const LossFamily& loss, const ConvexSet& set,
                const SgdRunConfig& cfg) {
  CheckRun(data, loss, set, cfg);
  return RunPnsgd(data, loss, set, cfg);
}

SgdResult SkipPnsgd(std::span<const Example> data, const LossFamily& loss,
                    const ConvexSet& set, const SgdRunConfig& cfg) {
  CheckRun(data, loss, set, cfg);
  CounterRng index_rng(cfg.seed, Stream::kIndex, 0);
  const uint64_t n = data.size();
  const uint64_t t0 = index_rng.NextBelow(n / 2 + 1);
  SgdResult result = RunPnsgd(data.subspan(t0), loss, set, cfg);
  result.skip_t0 = static_cast<int>(t0);
  result.index_draws = index_rng.index_draws();
  return result;
}

SgdResult StopPnsgd(std::span<const Example> data, const LossFamily& loss,
                    const ConvexSet& set, const SgdRunConfig& cfg) {
  CheckRun(data, loss, set, cfg);
  CounterRng index_rng(cfg.seed, Stream::kIndex, 0);
  const uint64_t T = 1 + index_rng.NextBelow(data.size());
  SgdResult result = RunPnsgd(data.first(T), loss, set, cfg);
  result.stop_T = static_cast<int>(T);
  result.index_draws = index_rng.index_draws();
  return result;
}

SgdResult Pnmsgd(std::span<const Example> data, const LossFamily& loss, const ConvexSet& set,
                 const SgdRunConfig& cfg) {
  CheckRun(data, loss, set, cfg);
  const uint64_t n = data.size();
  SgdResult total;
  Vector w = set.Contains(cfg.w0) ? cfg.w0 : set.Project(cfg.w0);
  for (uint64_t epoch = 0; epoch < n; ++epoch) {
    SgdRunConfig epoch_cfg = cfg;
    epoch_cfg.w0 = std::move(w);
    SgdResult r = RunPnsgd(data, loss, set, epoch_cfg, epoch * n);
    w = std::move(r.w);
    total.gaussian_draws += r.gaussian_draws;
    total.smoothing_draws += r.smoothing_draws;
    total.steps += r.steps;
  }
  total.w = std::move(w);
  total.amplification_valid = loss.is_smooth() && cfg.eta <= 2.0 / loss.smoothness();
  return total;
}

ContractivityReport CheckContractivity(const LossFamily& loss,
                                       std::span<const Example> examples, double eta,
                                       int trials, CounterRng& rng, double sample_radius) {
  if (trials < 1) throw std::invalid_argument("CheckContractivity: trials must be >= 1");
  if (examples.empty()) throw std::invalid_argument("CheckContractivity: need examples");
  const int d = loss.dim();
  ContractivityReport report;
  report.trials = trials;
  constexpr double kSlack = 1e-10;
  for (int trial = 0; trial < trials; ++trial) {
    Vector w(d), wp(d);
    for (int i = 0; i < d; ++i) {
      w[i] = sample_radius * (2.0 * rng.NextUniform() - 1.0);
      wp[i] = sample_radius * (2.0 * rng.NextUniform() - 1.0);
    }
    const Example& x = examples[rng.NextBelow(examples.size())];
    const Vector pw = w - eta * loss.Gradient(w, x);
    const Vector pwp = wp - eta * loss.Gradient(wp, x);
    const double before = (w - wp).norm();
    const double after = (pw - pwp).norm();
    if (before > 0.0) report.worst_ratio = std::max(report.worst_ratio, after / before);
    if (after > before + kSlack) {
      ++report.violations;
      if (report.cases.size() < 32) {
        report.cases.push_back({trial, after - before, before > 0 ? after / before : 0.0});
      }
    }
  }
  return report;
}

namespace {

constexpr char kBinaryMagic[4] = {'C', 'N', 'I', '1'};

}  // namespace

std::vector<Example> LoadExamplesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("LoadExamplesCsv: cannot open " + path);
  std::vector<Example> data;
  std::string line;
  size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      size_t used = 0;
      const double v = std::stod(cell, &used);
      values.push_back(v);
    }
    if (values.size() < 2) {
      throw std::runtime_error("LoadExamplesCsv: each row needs features and a label");
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw std::runtime_error("LoadExamplesCsv: ragged rows in " + path);
    }
    Vector f(static_cast<Eigen::Index>(values.size() - 1));
    for (size_t i = 0; i + 1 < values.size(); ++i) f[static_cast<Eigen::Index>(i)] = values[i];
    data.emplace_back(std::move(f), values.back());
  }
  if (data.empty()) throw std::runtime_error("LoadExamplesCsv: no rows in " + path);
  return data;
}

void SaveExamplesCsv(std::span<const Example> data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("SaveExamplesCsv: cannot open " + path);
  out.precision(17);
  for (const Example& x : data) {
    for (Eigen::Index i = 0; i < x.features.size(); ++i) out << x.features[i] << ',';
    out << x.label << '\n';
  }
}

std::vector<Example> LoadExamplesBinary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("LoadExamplesBinary: cannot open " + path);
  char magic[4];
  uint32_t d = 0;
  uint64_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0) {
    throw std::runtime_error("LoadExamplesBinary: bad header in " + path);
  }
  if (d == 0 || n == 0) throw std::runtime_error("LoadExamplesBinary: empty dataset");
  std::vector<Example> data;
  data.reserve(n);
  std::vector<double> row(d + 1);
  for (uint64_t r = 0; r < n; ++r) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
    if (!in) throw std::runtime_error("LoadExamplesBinary: truncated file " + path);
    Vector f(d);
    for (uint32_t i = 0; i < d; ++i) f[i] = row[i];
    data.emplace_back(std::move(f), row[d]);
  }
  return data;
}

void SaveExamplesBinary(std::span<const Example> data, const std::string& path) {
  if (data.empty()) throw std::invalid_argument("SaveExamplesBinary: empty dataset");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("SaveExamplesBinary: cannot open " + path);
  const uint32_t d = static_cast<uint32_t>(data[0].features.size());
  const uint64_t n = data.size();
  out.write(kBinaryMagic, 4);
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  std::vector<double> row(d + 1);
  for (const Example& x : data) {
    for (uint32_t i = 0; i < d; ++i) row[i] = x.features[i];
    row[d] = x.label;
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * 8));
  }
}

}  // namespace pai
