// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "futurefoul/features.hpp"
#include "futurefoul/model.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {

struct TrainConfig {
  double lr = 1e-3;
  int batch_size = 32;
  int epochs = 30;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Percentages with FOUL as the positive class. A 0/0 precision or recall is
/// reported as 0 and flagged.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  Confusion confusion;
  bool precision_undefined = false;
  bool recall_undefined = false;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics compute_metrics(std::span<const Label> predicted, std::span<const Label> actual);
Metrics metrics_from_confusion(const Confusion& confusion);

std::string metrics_json(const Metrics& m);
Metrics parse_metrics_json(const std::string& text);
/// Human-readable table of the three percentages and the confusion counts.
std::string metrics_table(const Metrics& m);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_acc = 0.0;  // percent
  double val_acc = 0.0;    // percent

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct History {
  std::vector<EpochRecord> epochs;

  /// epoch,train_loss,val_loss,train_acc,val_acc
  std::string csv() const;
  void write_csv(const std::filesystem::path& path) const;

  friend bool operator==(const History&, const History&) = default;
};

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Shuffles [0, count) with `seed` and cuts the first train + val + test
/// indices into the three parts. Throws ConfigError when the sizes exceed
/// `count`.
DatasetSplit split_dataset(std::size_t count, const std::array<std::size_t, 3>& sizes, std::uint64_t seed);

/// Foul count per split part, in train, val, test order.
std::array<std::size_t, 3> foul_counts(const DatasetSplit& split, std::span<const Label> labels);

struct Evaluation {
  Metrics metrics;
  double loss = 0.0;
  std::vector<double> foul_probability;
  std::vector<Label> predicted;
};

/// Eval-mode pass with argmax decisions.
Evaluation evaluate(FutureFoulNet<float>& model, std::span<const Sample* const> samples, int batch_size = 32);

struct TrainOutcome {
  History history;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on mean cross-entropy. After each epoch the model is
/// evaluated on `val`; on return it holds the weights of the epoch with the
/// best validation accuracy (ties keep the earlier epoch). Throws
/// TrainingDiverged on a non-finite loss.
TrainOutcome train(FutureFoulNet<float>& model, std::span<const Sample* const> train_set,
                   std::span<const Sample* const> val, const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace futurefoul
