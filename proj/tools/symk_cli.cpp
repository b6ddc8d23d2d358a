/* Copyright (c) 2026 The symkernels Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

// symk: train, evaluate, verify and benchmark symmetric-kernel DenseNets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symk/symk.hpp"
#include "symk/verify.hpp"

namespace {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

struct TrainArgs {
  symk::RunConfig run;
  std::size_t subset = 0;
  std::string checkpoint_out;
  std::string checkpoint_in;
};

int run_train(TrainArgs& args) {
  symk::RunConfig& cfg = args.run;
  if (args.subset > 0) cfg.subset = args.subset;
  if (!args.checkpoint_out.empty()) cfg.checkpoint_out = args.checkpoint_out;
  if (!args.checkpoint_in.empty()) cfg.checkpoint_in = args.checkpoint_in;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  symk::CifarSplits data;
  std::ofstream metrics;
  try {
    data = symk::load_cifar10(cfg.data_dir);
    if (!cfg.metrics_out.empty()) {
      metrics.open(cfg.metrics_out, std::ios::trunc);
      if (!metrics) throw symk::IoError(cfg.metrics_out.string(), 0, "cannot open metrics file");
      metrics << symk::kMetricsHeader << "\n" << std::flush;
    }
  } catch (const symk::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  }

  std::cout << "level " << cfg.level << ", " << (cfg.subset ? *cfg.subset : data.train.size()) << " training images, "
            << cfg.epochs << " epochs, batch " << cfg.batch_size << "\n"
            << symk::kMetricsHeader << "\n";
  try {
    const auto result = symk::train(cfg, data.train, data.test, [&](const symk::MetricsRow& row) {
      const std::string line = symk::format_metrics_row(row);
      std::cout << line << std::endl;
      if (metrics.is_open()) metrics << line << "\n" << std::flush;
    });
    if (cfg.checkpoint_out) symk::save_checkpoint(result.network, *cfg.checkpoint_out);
  } catch (const symk::TrainingDiverged& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const symk::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

int run_eval(const std::string& checkpoint, const std::string& data_dir, std::size_t workers) {
  try {
    const symk::Network net = symk::load_checkpoint(checkpoint);
    const symk::Dataset test = symk::load_cifar10_test(data_dir);
    const symk::Evaluation e = symk::evaluate(net, test, workers);
    std::printf("level %d, %zu parameters, %zu test images\n", symk::to_int(net.level()), net.parameter_count(),
                test.size());
    std::printf("test_loss=%.6f test_acc=%.6f\n", e.loss, e.accuracy);
  } catch (const symk::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}

int run_verify(int level_arg, std::uint64_t seed) {
  const symk::SymmetryLevel level = symk::symmetry_level(level_arg);
  std::printf("verifying level %d (seed %llu)\n", level_arg, static_cast<unsigned long long>(seed));
  const auto checks = symk::verify::run_suite(level, seed);
  for (const auto& c : checks) {
    std::printf("[%-13s] %-52s max_err=%.3e tol=%.0e\n", symk::verify::to_string(c.status), c.name.c_str(),
                c.measured, c.tolerance);
  }
  const bool ok = symk::verify::all_passed(checks);
  std::printf("%s\n", ok ? "all applicable checks passed" : "verification FAILED");
  return ok ? kOk : kCheckFailed;
}

int run_bench(const std::vector<int>& level_args, std::size_t repetitions) {
  if (repetitions < 10) {
    std::cerr << "usage error: --repetitions must be >= 10\n";
    return kUsage;
  }
  std::vector<symk::SymmetryLevel> levels;
  for (int l : level_args) levels.push_back(symk::symmetry_level(l));
  const auto rows = symk::bench_forward(levels, repetitions);
  std::printf("forward conv (93,8,8) -> 30, %zu repetitions\n", repetitions);
  std::printf("%5s %16s %18s %16s\n", "level", "mults/out/slice", "median_ns/output", "median_us/call");
  for (const auto& r : rows) {
    std::printf("%5d %16.1f %18.2f %16.1f\n", symk::to_int(r.level), r.multiplies_per_slice, r.median_ns_per_output,
                r.median_ns_total / 1000.0);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric 3x3 kernel DenseNet: train, eval, verify, bench"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the CIFAR-10 network at one symmetry level");
  train_cmd->add_option("--level", train.run.level, "Symmetry level 0..4")->required()->check(CLI::Range(0, 4));
  train_cmd->add_option("--epochs", train.run.epochs, "Number of epochs")->required();
  train_cmd->add_option("--batch-size", train.run.batch_size, "Minibatch size")->capture_default_str();
  train_cmd->add_option("--lr", train.run.base_lr, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--decay", train.run.decay, "Learning-rate decay factor")->capture_default_str();
  train_cmd->add_option("--decay-every", train.run.decay_every, "Epochs between decays")->capture_default_str();
  train_cmd->add_option("--seed", train.run.seed, "Seed for init, subset and shuffling")->capture_default_str();
  train_cmd->add_option("--data-dir", train.run.data_dir, "Directory with the CIFAR-10 binary batches")->required();
  train_cmd->add_option("--subset", train.subset, "Train on N examples drawn by a seeded shuffle");
  train_cmd->add_option("--metrics-out", train.run.metrics_out, "Metrics CSV path");
  train_cmd->add_option("--checkpoint-out", train.checkpoint_out, "Write the final checkpoint here");
  train_cmd->add_option("--checkpoint-in", train.checkpoint_in, "Resume from this checkpoint");
  train_cmd->add_option("--eval-every", train.run.eval_every, "Epochs between metric rows")->capture_default_str();
  train_cmd->add_option("--workers", train.run.workers, "Threads for per-example gradients")->capture_default_str();

  std::string eval_checkpoint, eval_data;
  std::size_t eval_workers = 1;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the CIFAR-10 test split");
  eval_cmd->add_option("--checkpoint-in", eval_checkpoint, "Checkpoint to evaluate")->required();
  eval_cmd->add_option("--data-dir", eval_data, "Directory with the CIFAR-10 binary batches")->required();
  eval_cmd->add_option("--workers", eval_workers, "Evaluation threads")->capture_default_str();

  int verify_level = 1;
  std::uint64_t verify_seed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the equivariance/invariance/gradient property suite");
  verify_cmd->add_option("--level", verify_level, "Symmetry level 0..4")->required()->check(CLI::Range(0, 4));
  verify_cmd->add_option("--seed", verify_seed, "Seed")->capture_default_str();

  std::vector<int> bench_levels{0, 1, 2, 3, 4};
  std::size_t bench_reps = 100;
  auto* bench_cmd = app.add_subcommand("bench", "Time the tied forward convolution per level");
  bench_cmd->add_option("--levels", bench_levels, "Levels to time")->delimiter(',')->check(CLI::Range(0, 4));
  bench_cmd->add_option("--repetitions", bench_reps, "Timed repetitions (>= 10)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*train_cmd) return run_train(train);
  if (*eval_cmd) return run_eval(eval_checkpoint, eval_data, eval_workers);
  if (*verify_cmd) return run_verify(verify_level, verify_seed);
  if (*bench_cmd) return run_bench(bench_levels, bench_reps);
  return kUsage;
}
