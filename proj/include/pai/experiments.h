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
// Desk-scale experiment driver: baseline utility, per-person privacy
// tables, public/private splits, multi-task runs, and smoothing, each with
// the accountant's certified privacy recorded next to the measured loss.
// Every experiment validates its hypotheses up front and never reports
// privacy it cannot certify.

#ifndef PAI_EXPERIMENTS_H_
#define PAI_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pai/accountant.h"

namespace pai {

enum class Task { kLeastSquares, kLogistic, kHingeSmoothed, kConstant };
enum class Variant { kPnsgd, kSkip, kStop, kPnmsgd };

std::string TaskName(Task task);
std::string VariantName(Variant variant);
Task ParseTask(const std::string& name);
Variant ParseVariant(const std::string& name);

struct ExperimentConfig {
  Task task = Task::kLeastSquares;
  Variant variant = Variant::kStop;
  int n = 4096;
  int d = 8;
  int k = 1;
  int m_public = 0;
  int trials = 100;
  double radius = 1.0;
  double lipschitz = 0.0;  // 0 = derived from the task
  double epsilon = 1.0;
  double delta = 0.01;
  uint64_t seed = 12345;
  double lambda_override = 0.0;  // smoothing kernel width; 0 = formula value
  std::string output_path;       // CSV appended here when nonempty
};

struct PrivacyEntry {
  int index = 0;
  double nominal = 0.0;
  double certified = 0.0;
};

struct PrivacyReport {
  std::string kind;  // "local", "per_index", or "composed"
  double eps_nominal = 0.0;
  double eps_certified = 0.0;
  double delta = 0.0;
  std::vector<PrivacyEntry> per_index;
};

struct ResultRow {
  std::string experiment;
  ExperimentConfig cfg;
  double sigma = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  double mean_excess = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  // The bound with its privacy factor stripped (the statistical term).
  double baseline_term = 0.0;
  PrivacyReport privacy;
  double wall_seconds = 0.0;  // console only; never written to CSV
  std::vector<std::string> warnings;
};

ResultRow RunBaseline(const ExperimentConfig& cfg);
ResultRow RunPerPerson(const ExperimentConfig& cfg);
ResultRow RunPublicPrivate(const ExperimentConfig& cfg);
ResultRow RunMultitask(const ExperimentConfig& cfg);
ResultRow RunSmoothing(const ExperimentConfig& cfg);

// Dispatch by experiment name: baseline | per-person | public-private |
// multitask | smoothing.
ResultRow RunExperiment(const std::string& name, const ExperimentConfig& cfg);

// Versioned CSV schema; one row per aggregated run, no timing columns so
// reruns with the same seed are byte-identical.
std::string CsvHeader();
std::string CsvLine(const ResultRow& row);
void AppendCsv(const ResultRow& row, const std::string& path);

// Console rendering (includes wall time).
std::string Summary(const ResultRow& row);

// Prefixes a relative path with $PAI_OUTPUT_DIR when the variable is set.
std::string ResolveOutputPath(const std::string& path);

// Applies a simple key=value config file on top of cfg (file entries take
// precedence over flags). Keys: task, variant, n, d, k, m_public, trials,
// R, L, epsilon, delta, seed, lambda, out. '#' starts a comment.
void ApplyConfigFile(const std::string& path, ExperimentConfig* cfg);

}  // namespace pai

#endif  // PAI_EXPERIMENTS_H_
