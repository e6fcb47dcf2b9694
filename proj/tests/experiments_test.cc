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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pai {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig cfg;
  cfg.n = 256;
  cfg.d = 4;
  cfg.trials = 30;
  cfg.seed = 777;
  return cfg;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

TEST(BaselineTest, SigmaFormulaAndBoundRecorded) {
  ExperimentConfig cfg = SmallConfig();
  cfg.lipschitz = 1.0;
  cfg.epsilon = 1.0;
  cfg.delta = 0.01;
  const ResultRow row = RunBaseline(cfg);
  EXPECT_NEAR(row.sigma, 6.215, 1e-3);  // 2 sqrt(2 ln 125)
  const double A = std::log(1.25 / cfg.delta);
  EXPECT_NEAR(row.bound,
              4.0 * cfg.radius * 1.0 / std::sqrt(256.0) * std::sqrt(1.0 + 8.0 * 4.0 * A),
              1e-12);
  EXPECT_LE(row.mean_excess, row.bound + 3.0 * row.std_error);
  EXPECT_GT(row.privacy.eps_certified, 0.0);
}

TEST(BaselineTest, ConstantTaskHasZeroExcess) {
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kConstant;
  const ResultRow row = RunBaseline(cfg);
  EXPECT_EQ(row.mean_excess, 0.0);
  EXPECT_EQ(row.std_error, 0.0);
}

TEST(BaselineTest, RequiresEnoughTrials) {
  ExperimentConfig cfg = SmallConfig();
  cfg.trials = 10;
  EXPECT_THROW(RunBaseline(cfg), std::invalid_argument);
}

TEST(PerPersonTest, PrivacyTableShape) {
  ExperimentConfig cfg = SmallConfig();
  const ResultRow row = RunPerPerson(cfg);
  ASSERT_EQ(row.privacy.per_index.size(), 5u);
  EXPECT_EQ(row.privacy.per_index.front().index, 1);
  EXPECT_EQ(row.privacy.per_index.back().index, cfg.n);
  // t=1 entry is eps / sqrt(n); t=n entry is eps.
  EXPECT_NEAR(row.privacy.per_index.front().nominal, cfg.epsilon / std::sqrt(256.0), 1e-12);
  EXPECT_DOUBLE_EQ(row.privacy.per_index.back().nominal, cfg.epsilon);
  for (size_t i = 1; i < row.privacy.per_index.size(); ++i) {
    EXPECT_GE(row.privacy.per_index[i].nominal, row.privacy.per_index[i - 1].nominal);
    EXPECT_GE(row.privacy.per_index[i].certified, row.privacy.per_index[i - 1].certified);
  }
  EXPECT_LE(row.mean_excess, row.bound + 3.0 * row.std_error);
}

TEST(PublicPrivateTest, SigmaShrinksWithPublicCount) {
  ExperimentConfig cfg = SmallConfig();
  cfg.m_public = 1;
  const double sigma_one = RunPublicPrivate(cfg).sigma;
  cfg.m_public = cfg.n - 1;
  const double sigma_many = RunPublicPrivate(cfg).sigma;
  EXPECT_NEAR(sigma_many / sigma_one, 1.0 / std::sqrt(255.0), 1e-9);
}

TEST(PublicPrivateTest, RejectsMissingPublicData) {
  ExperimentConfig cfg = SmallConfig();
  cfg.m_public = 0;
  EXPECT_THROW(RunPublicPrivate(cfg), std::invalid_argument);
  cfg.m_public = cfg.n;
  EXPECT_THROW(RunPublicPrivate(cfg), std::invalid_argument);
}

TEST(PublicPrivateTest, EnoughPublicPointsReachTheStatisticalTerm) {
  ExperimentConfig cfg = SmallConfig();
  const double A = std::log(1.25 / cfg.delta);
  cfg.m_public = static_cast<int>(
      std::ceil(8.0 * cfg.d * A / (cfg.epsilon * cfg.epsilon)));
  const ResultRow row = RunPublicPrivate(cfg);
  EXPECT_LE(row.bound, std::sqrt(2.0) * row.baseline_term * (1.0 + 1e-12));
  EXPECT_LE(row.mean_excess, row.bound + 3.0 * row.std_error);
}

TEST(MultitaskTest, BranchCrossoverAndSigmaIdentity) {
  ExperimentConfig cfg = SmallConfig();
  cfg.epsilon = 0.5;
  cfg.k = 1;
  const ResultRow one = RunMultitask(cfg);
  // Largest k on the 2 ln(1/delta) branch: k <= n ln(1/delta) / ln n.
  const int k_max = static_cast<int>(std::floor(
      cfg.n * std::log(1.0 / cfg.delta) / std::log(static_cast<double>(cfg.n))));
  cfg.k = std::min(k_max, 6);  // keep the runtime small; still on the branch
  const ResultRow same_branch = RunMultitask(cfg);
  EXPECT_EQ(one.sigma, same_branch.sigma);
  EXPECT_LE(one.privacy.eps_certified, cfg.epsilon);
}

TEST(MultitaskTest, HypothesisValidation) {
  ExperimentConfig cfg = SmallConfig();
  cfg.epsilon = 1.0;  // must be < 1
  EXPECT_THROW(RunMultitask(cfg), std::invalid_argument);
  cfg.epsilon = 0.5;
  cfg.delta = 0.6;
  EXPECT_THROW(RunMultitask(cfg), std::invalid_argument);
}

TEST(SmoothingTest, LambdaFormulaAndAdmissibility) {
  ExperimentConfig cfg;
  cfg.task = Task::kHingeSmoothed;
  cfg.d = 1;
  cfg.n = 10000;
  cfg.trials = 30;
  cfg.epsilon = 0.5;
  cfg.delta = 0.01;
  const ResultRow row = RunSmoothing(cfg);
  EXPECT_NEAR(row.lambda, 0.5 / (2.0 * std::sqrt(10000.0 * std::log(100.0))), 1e-9);
  EXPECT_NEAR(row.lambda, 0.001165, 2e-6);
  // eta <= 2 lambda / L held (the run validates it internally).
  EXPECT_LE(row.eta, 2.0 * row.lambda / row.cfg.lipschitz + 1e-15);
  EXPECT_TRUE(row.warnings.empty());
}

TEST(SmoothingTest, HingeTaskNeedsDimensionOne) {
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kHingeSmoothed;
  cfg.d = 2;
  EXPECT_THROW(RunSmoothing(cfg), std::invalid_argument);
}

TEST(SmoothingTest, WarnsOnSmoothTaskAndLargeLambda) {
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kLeastSquares;
  cfg.lambda_override = 0.5;  // far above the formula value
  const ResultRow row = RunSmoothing(cfg);
  bool smooth_warning = false, lambda_warning = false;
  for (const std::string& w : row.warnings) {
    smooth_warning |= w.find("already smooth") != std::string::npos;
    lambda_warning |= w.find("degrades loss") != std::string::npos;
  }
  EXPECT_TRUE(smooth_warning);
  EXPECT_TRUE(lambda_warning);
}

TEST(CsvTest, ReRunsAreByteIdentical) {
  namespace fs = std::filesystem;
  const std::string path_a = fs::temp_directory_path() / "pai_csv_a.csv";
  const std::string path_b = fs::temp_directory_path() / "pai_csv_b.csv";
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
  ExperimentConfig cfg = SmallConfig();
  cfg.output_path = path_a;
  RunBaseline(cfg);
  cfg.output_path = path_b;
  RunBaseline(cfg);
  const std::string a = ReadFile(path_a);
  const std::string b = ReadFile(path_b);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST(CsvTest, SchemaHeaderStable) {
  const std::string header = CsvHeader();
  EXPECT_EQ(header.substr(0, 7), "schema,");
  EXPECT_NE(header.find("mean_excess_loss"), std::string::npos);
  EXPECT_NE(header.find("eps_certified"), std::string::npos);
  EXPECT_NE(header.find("warnings"), std::string::npos);
  // No timing columns: reruns must be byte-identical.
  EXPECT_EQ(header.find("wall"), std::string::npos);
  // Column count matches every emitted line.
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kConstant;
  const ResultRow row = RunBaseline(cfg);
  const std::string line = CsvLine(row);
  const auto count_commas = [](const std::string& s) {
    size_t c = 0;
    for (char ch : s) c += ch == ',' ? 1 : 0;
    return c;
  };
  EXPECT_EQ(count_commas(header), count_commas(line));
}

TEST(OutputPathTest, EnvironmentVariablePrefixesRelativePaths) {
  setenv("PAI_OUTPUT_DIR", "/tmp/pai_out_dir", 1);
  EXPECT_EQ(ResolveOutputPath("results.csv"), "/tmp/pai_out_dir/results.csv");
  EXPECT_EQ(ResolveOutputPath("/abs/results.csv"), "/abs/results.csv");
  unsetenv("PAI_OUTPUT_DIR");
  EXPECT_EQ(ResolveOutputPath("results.csv"), "results.csv");
}

TEST(LipschitzOverrideTest, OverrideBecomesTheClippingLevel) {
  ExperimentConfig cfg = SmallConfig();
  cfg.lipschitz = 1.0;  // below the derived 2R + s = 2.5: enforced by clipping
  const ResultRow row = RunBaseline(cfg);
  EXPECT_DOUBLE_EQ(row.cfg.lipschitz, 1.0);
  EXPECT_NEAR(row.sigma, 2.0 * std::sqrt(2.0 * std::log(125.0)), 1e-9);
}

TEST(LipschitzOverrideTest, UnclippableFamiliesRejectUnsafeOverrides) {
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kLogistic;
  cfg.n = 64;
  cfg.lipschitz = 0.5;  // below the honest constant for logistic
  EXPECT_THROW(RunBaseline(cfg), std::invalid_argument);
}

TEST(ConfigFileTest, FileEntriesOverrideFlags) {
  namespace fs = std::filesystem;
  const std::string path = fs::temp_directory_path() / "pai_config_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "n = 128\n"
        << "epsilon=0.25   # trailing comment\n"
        << "task = constant\n";
  }
  ExperimentConfig cfg = SmallConfig();
  cfg.n = 999;           // flag value, to be overridden
  cfg.epsilon = 1.0;
  ApplyConfigFile(path, &cfg);
  EXPECT_EQ(cfg.n, 128);
  EXPECT_EQ(cfg.epsilon, 0.25);
  EXPECT_EQ(cfg.task, Task::kConstant);
  EXPECT_EQ(cfg.d, 4);  // untouched fields keep their flag values
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "unknown_key = 3\n";
  }
  EXPECT_THROW(ApplyConfigFile(path, &cfg), std::runtime_error);
  std::remove(path.c_str());
  EXPECT_THROW(ApplyConfigFile("/nonexistent/pai.cfg", &cfg), std::runtime_error);
}

TEST(DispatchTest, NamesRoundTrip) {
  EXPECT_EQ(TaskName(ParseTask("least-squares")), "least-squares");
  EXPECT_EQ(TaskName(ParseTask("hinge-smoothed")), "hinge-smoothed");
  EXPECT_EQ(VariantName(ParseVariant("pnmsgd")), "pnmsgd");
  EXPECT_THROW(ParseTask("bogus"), std::invalid_argument);
  EXPECT_THROW(ParseVariant("bogus"), std::invalid_argument);
  EXPECT_THROW(RunExperiment("bogus", SmallConfig()), std::invalid_argument);
}

// Logistic task: excess loss is estimated against a solver reference; it
// must stay within the utility bound like the closed-form tasks.
TEST(LogisticTaskTest, BaselineBoundHolds) {
  ExperimentConfig cfg = SmallConfig();
  cfg.task = Task::kLogistic;
  cfg.n = 128;
  const ResultRow row = RunBaseline(cfg);
  EXPECT_LE(row.mean_excess, row.bound + 3.0 * row.std_error);
  EXPECT_GE(row.mean_excess, -3.0 * row.std_error);
}

}  // namespace
}  // namespace pai
