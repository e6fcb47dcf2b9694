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
// pai: privacy accounting and desk-scale experiments for noisy projected
// SGD run as a contractive noisy iteration.
//
//   pai account  --n ... --lipschitz ... --sigma ... --eta ... --beta ...
//   pai run <baseline|per-person|public-private|multitask|smoothing> [flags]
//   pai verify   [--out report.jsonl]
//
// A key=value config file (--config) overrides flags; the PAI_OUTPUT_DIR
// environment variable prefixes relative output paths.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pai/accountant.h"
#include "pai/experiments.h"
#include "pai/verify.h"

namespace {

int RunAccount(int n, double lipschitz, double sigma, double eta, double beta, double delta,
               double alpha) {
  const pai::SgdPrivacyConfig cfg(n, lipschitz, sigma, eta, beta);
  const pai::RenyiOrder order(alpha);
  std::printf("one-pass per-index RDP at alpha=%g (eps in nats):\n", alpha);
  for (int t : {1, (n + 3) / 4, (n + 1) / 2, (3 * n + 3) / 4, n}) {
    const double eps = pai::PerIndexPnsgdRdp(cfg, t, order).epsilon;
    const double eps_dp =
        pai::TightestDp([&](double a) { return pai::PerIndexPnsgdRdp(cfg, t,
                                                                     pai::RenyiOrder(a)).epsilon; },
                        delta, pai::DefaultAlphaGrid())
            .epsilon;
    std::printf("  index %6d: rdp eps = %.6g, (eps, delta=%g)-DP eps = %.6g\n", t, eps, delta,
                eps_dp);
  }
  std::printf("local RDP: eps = %.6g; converted eps = %.6g\n",
              pai::LocalRdp(cfg, order).epsilon,
              pai::TightestDp([&](double a) { return pai::LocalRdp(cfg, pai::RenyiOrder(a)).epsilon; },
                              delta, pai::DefaultAlphaGrid())
                  .epsilon);
  const double threshold = pai::StopPnsgdSigmaThreshold(lipschitz, alpha);
  if (sigma >= threshold) {
    std::printf("random-stop RDP: eps = %.6g\n", pai::StopPnsgdRdp(cfg, order).epsilon);
  } else {
    std::printf("random-stop RDP: unavailable (sigma %.6g below threshold %.6g)\n", sigma,
                threshold);
  }
  std::printf("multiple-epoch RDP: eps = %.6g (stated form 4 alpha L^2/sigma^2 = %.6g)\n",
              pai::MultiepochPnmsgdRdp(cfg, order).epsilon,
              4.0 * alpha * lipschitz * lipschitz / (sigma * sigma));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy accounting for noisy projected SGD (contractive noisy iterations)"};
  app.require_subcommand(1);

  // --- account ---
  auto* account = app.add_subcommand("account", "print privacy tables from parameters");
  int acc_n = 1024;
  double acc_L = 1.0, acc_sigma = 4.0, acc_eta = 0.1, acc_beta = 1.0, acc_delta = 1e-5,
         acc_alpha = 2.0;
  account->add_option("--n", acc_n, "dataset size");
  account->add_option("--lipschitz,-L", acc_L, "Lipschitz constant of the loss");
  account->add_option("--sigma", acc_sigma, "gradient-noise scale");
  account->add_option("--eta", acc_eta, "learning rate");
  account->add_option("--beta", acc_beta, "smoothness of the loss");
  account->add_option("--delta", acc_delta, "DP delta for conversions");
  account->add_option("--alpha", acc_alpha, "order for the RDP printouts");

  // --- run ---
  auto* run = app.add_subcommand("run", "run a desk-scale experiment");
  std::string experiment;
  run->add_option("experiment", experiment,
                  "baseline | per-person | public-private | multitask | smoothing")
      ->required();
  pai::ExperimentConfig cfg;
  std::string task_name = "least-squares";
  std::string variant_name;
  std::string config_file;
  run->add_option("--task", task_name,
                  "least-squares | logistic | hinge-smoothed | constant");
  run->add_option("--variant", variant_name,
                  "pnsgd | skip | stop | pnmsgd (experiments override to match "
                  "their guarantee)");
  run->add_option("--n", cfg.n, "dataset size");
  run->add_option("--d", cfg.d, "dimension");
  run->add_option("--k", cfg.k, "number of tasks (multitask)");
  run->add_option("--m-public", cfg.m_public, "public examples at the end of the stream");
  run->add_option("--trials", cfg.trials, "independent trials (>= 30)");
  run->add_option("--R", cfg.radius, "feasible-ball radius");
  run->add_option("--L", cfg.lipschitz, "Lipschitz constant override (0 = derive)");
  run->add_option("--epsilon", cfg.epsilon, "target epsilon");
  run->add_option("--delta", cfg.delta, "target delta");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--lambda", cfg.lambda_override, "smoothing width override");
  run->add_option("--out", cfg.output_path, "CSV output path (appended)");
  run->add_option("--config", config_file, "key=value file; overrides flags");

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "run the numerical verification suites");
  std::string verify_out = "verify_report.jsonl";
  pai::VerifyOptions verify_options;
  verify->add_option("--out", verify_out, "JSON-lines report path");
  verify->add_option("--trials", verify_options.random_trials, "randomized CNI configurations");
  verify->add_option("--seed", verify_options.seed, "suite seed");
  verify
      ->add_option("--mutate-renyi-denominator", verify_options.renyi_denominator,
                   "test-only hook: wrong constant injection")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    if (account->parsed()) {
      return RunAccount(acc_n, acc_L, acc_sigma, acc_eta, acc_beta, acc_delta, acc_alpha);
    }
    if (run->parsed()) {
      cfg.task = pai::ParseTask(task_name);
      if (!variant_name.empty()) cfg.variant = pai::ParseVariant(variant_name);
      if (!config_file.empty()) pai::ApplyConfigFile(config_file, &cfg);
      cfg.output_path = pai::ResolveOutputPath(cfg.output_path);
      const pai::ResultRow row = pai::RunExperiment(experiment, cfg);
      std::cout << pai::Summary(row);
      if (!row.cfg.output_path.empty()) {
        std::cout << "wrote " << row.cfg.output_path << "\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      const std::vector<pai::VerifyCase> cases = pai::RunAllSuites(verify_options);
      const std::string out_path = pai::ResolveOutputPath(verify_out);
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      pai::WriteJsonLines(cases, out);
      int failed = 0;
      for (const pai::VerifyCase& c : cases) failed += c.pass ? 0 : 1;
      std::printf("%zu checks, %d failed; report at %s\n", cases.size(), failed,
                  out_path.c_str());
      return failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
