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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "symk/checkpoint.hpp"
#include "symk/data.hpp"
#include "symk/network.hpp"
#include "symk/optim.hpp"

namespace symk {

struct RunConfig {
  int level = 1;
  std::size_t epochs = 1;
  std::size_t batch_size = 1280;
  double base_lr = 0.02;
  double decay = 0.97;
  std::size_t decay_every = 5;
  std::uint64_t seed = 0;
  std::filesystem::path data_dir;
  std::optional<std::size_t> subset;
  std::filesystem::path metrics_out;
  std::optional<std::filesystem::path> checkpoint_out;
  std::optional<std::filesystem::path> checkpoint_in;
  std::size_t eval_every = 5;
  std::size_t workers = 1;  // results do not depend on this

  void validate() const {
    if (level < 0 || level > kMaxSymmetryLevel) throw std::invalid_argument("--level must be in 0..4");
    if (epochs < 1) throw std::invalid_argument("--epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("--batch-size must be >= 1");
    if (decay_every < 1) throw std::invalid_argument("--decay-every must be >= 1");
    if (eval_every < 1) throw std::invalid_argument("--eval-every must be >= 1");
    if (subset && (*subset < 1 || *subset > 50000)) throw std::invalid_argument("--subset must be in 1..50000");
    if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw std::invalid_argument("--lr must be positive");
    if (!(decay > 0.0) || !std::isfinite(decay)) throw std::invalid_argument("--decay must be positive");
  }

  LearningRateSchedule schedule() const { return {base_lr, decay, decay_every}; }
};

struct MetricsRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
};

inline constexpr const char* kMetricsHeader = "epoch,train_loss,train_acc,test_loss,test_acc";

inline std::string format_metrics_row(const MetricsRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f", r.epoch, r.train_loss, r.train_acc, r.test_loss,
                r.test_acc);
  return buf;
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : rows) out += format_metrics_row(r) + "\n";
  return out;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads with a static stride split.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, n, workers] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

struct BatchGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/**
 * Mean loss and gradient over `indices`.
 *
 * Per-example gradients are evaluated in waves (possibly in parallel) and
 * summed strictly in ascending position order, so the result is bitwise
 * independent of the worker count.
 */
inline BatchGradient batch_gradient(const Network& net, const Dataset& ds, std::span<const std::size_t> indices,
                                    std::size_t workers = 1) {
  if (indices.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  BatchGradient out{0.0, std::vector<double>(net.parameter_count(), 0.0)};
  const std::size_t wave = std::max<std::size_t>(1, workers) * 4;
  std::vector<LossAndGradients> slots(wave);
  for (std::size_t first = 0; first < indices.size(); first += wave) {
    const std::size_t n = std::min(wave, indices.size() - first);
    parallel_for(n, workers, [&](std::size_t k) {
      const std::size_t idx = indices[first + k];
      slots[k] = network_backward(net, ds.images[idx], ds.labels[idx]);
    });
    for (std::size_t k = 0; k < n; ++k) {
      out.loss += slots[k].loss;
      const auto& g = slots[k].gradients.flat;
      for (std::size_t i = 0; i < g.size(); ++i) out.gradient[i] += g[i];
    }
  }
  const double scale = static_cast<double>(indices.size());
  out.loss /= scale;
  for (double& g : out.gradient) g /= scale;
  return out;
}

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean cross-entropy and argmax accuracy (ties go to the lowest class index).
inline Evaluation evaluate(const Network& net, const Dataset& ds, std::size_t workers = 1) {
  if (ds.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  std::vector<double> losses(ds.size());
  std::vector<char> hits(ds.size());
  parallel_for(ds.size(), workers, [&](std::size_t i) {
    const Tensor logits = forward_trace(net, ds.images[i]).logits;
    const SoftmaxLoss sl = softmax_cross_entropy(logits, ds.labels[i]);
    losses[i] = sl.loss;
    const auto best = std::max_element(sl.probs.data().begin(), sl.probs.data().end()) - sl.probs.data().begin();
    hits[i] = static_cast<std::size_t>(best) == ds.labels[i];
  });
  Evaluation e;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    e.loss += losses[i];
    correct += hits[i] ? 1 : 0;
  }
  e.loss /= static_cast<double>(ds.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return e;
}

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, std::size_t last_good_epoch, const std::string& detail)
      : std::runtime_error("non-finite loss during epoch " + std::to_string(epoch + 1) + " (last good epoch " +
                           std::to_string(last_good_epoch) + "): " + detail),
        last_good_epoch_(last_good_epoch) {}
  std::size_t last_good_epoch() const noexcept { return last_good_epoch_; }

 private:
  std::size_t last_good_epoch_;
};

struct TrainResult {
  Network network;
  std::vector<MetricsRow> metrics;
};

/**
 * Adam training with the step-decay schedule. Epoch e (0-based) uses
 * lr_at_epoch(e). A metrics row is recorded after every `eval_every`
 * completed epochs and after the final epoch, with train metrics taken over
 * the full (possibly subset) training set.
 */
inline TrainResult train(const RunConfig& cfg, const NetworkConfig& arch, const Dataset& train_set,
                         const Dataset& test_set, const std::function<void(const MetricsRow&)>& on_eval = {}) {
  cfg.validate();
  if (to_int(arch.level) != cfg.level) throw std::invalid_argument("train: architecture level differs from config");
  Network net = cfg.checkpoint_in ? load_checkpoint(*cfg.checkpoint_in, arch.input_size) : make_network(arch, cfg.seed);
  if (net.config() != arch) {
    throw std::invalid_argument("train: checkpoint architecture does not match the requested level/shape");
  }
  const Dataset data = cfg.subset ? seeded_subset(train_set, *cfg.subset, cfg.seed) : train_set;
  const BatchPlan plan{cfg.seed, cfg.batch_size};
  const LearningRateSchedule schedule = cfg.schedule();

  AdamState adam(net.parameter_count());
  std::vector<double> params = net.parameters();
  std::vector<MetricsRow> rows;
  std::size_t last_good = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = schedule.at_epoch(epoch);
    for (const auto& batch : minibatches(data, plan, epoch)) {
      BatchGradient bg = batch_gradient(net, data, batch, cfg.workers);
      if (!std::isfinite(bg.loss)) throw TrainingDiverged(epoch, last_good, "minibatch loss " + std::to_string(bg.loss));
      try {
        adam_step(params, bg.gradient, adam, lr);
      } catch (const NonFiniteGradient& e) {
        throw TrainingDiverged(epoch, last_good, e.what());
      }
      net.set_parameters(params);
    }
    last_good = epoch + 1;
    if ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs) {
      const Evaluation tr = evaluate(net, data, cfg.workers);
      const Evaluation te = evaluate(net, test_set, cfg.workers);
      if (!std::isfinite(tr.loss) || !std::isfinite(te.loss)) {
        throw TrainingDiverged(epoch, epoch, "evaluation loss is not finite");
      }
      rows.push_back({epoch + 1, tr.loss, tr.accuracy, te.loss, te.accuracy});
      if (on_eval) on_eval(rows.back());
    }
  }
  return {std::move(net), std::move(rows)};
}

inline TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset& test_set,
                         const std::function<void(const MetricsRow&)>& on_eval = {}) {
  cfg.validate();
  return train(cfg, NetworkConfig::cifar(symmetry_level(cfg.level)), train_set, test_set, on_eval);
}

}  // namespace symk
