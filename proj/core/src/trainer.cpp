// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/trainer.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "futurefoul/error.hpp"
#include "futurefoul/nn/optim.hpp"
#include "json.hpp"

namespace futurefoul {

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite non-negative number");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
}

// ---------------------------------------------------------------------------
// Metrics

Metrics metrics_from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const std::size_t total = c.total();
  m.accuracy = total == 0 ? 0.0 : 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  m.precision_undefined = c.tp + c.fp == 0;
  m.recall_undefined = c.tp + c.fn == 0;
  m.precision = m.precision_undefined ? 0.0 : 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = m.recall_undefined ? 0.0 : 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return m;
}

Metrics compute_metrics(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("compute_metrics: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Foul;
    const bool a = actual[i] == Label::Foul;
    if (p && a) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (a) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return metrics_from_confusion(c);
}

std::string metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["precision_undefined"] = m.precision_undefined;
  j["recall_undefined"] = m.recall_undefined;
  j["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}};
  return j.dump(2) + "\n";
}

Metrics parse_metrics_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Metrics m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.precision_undefined = j.at("precision_undefined").get<bool>();
    m.recall_undefined = j.at("recall_undefined").get<bool>();
    const auto& c = j.at("confusion");
    m.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                   c.at("fn").get<std::size_t>()};
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad metrics document: ") + e.what());
  }
}

std::string metrics_table(const Metrics& m) {
  std::string out = fmt::format("{:<10} {:>7}\n", "metric", "value");
  out += fmt::format("{:<10} {:>7.1f}\n", "accuracy", m.accuracy);
  out += fmt::format("{:<10} {:>7.1f}{}\n", "precision", m.precision,
                     m.precision_undefined ? "  (undefined: no FOUL predictions)" : "");
  out += fmt::format("{:<10} {:>7.1f}{}\n", "recall", m.recall,
                     m.recall_undefined ? "  (undefined: no FOUL labels)" : "");
  out += fmt::format("confusion  tp={} fp={} tn={} fn={}\n", m.confusion.tp, m.confusion.fp, m.confusion.tn,
                     m.confusion.fn);
  return out;
}

// ---------------------------------------------------------------------------
// History

std::string History::csv() const {
  std::string out = "epoch,train_loss,val_loss,train_acc,val_acc\n";
  for (const auto& e : epochs) {
    out += fmt::format("{},{:.6f},{:.6f},{:.4f},{:.4f}\n", e.epoch, e.train_loss, e.val_loss, e.train_acc, e.val_acc);
  }
  return out;
}

void History::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << csv();
}

// ---------------------------------------------------------------------------
// Splits

DatasetSplit split_dataset(std::size_t count, const std::array<std::size_t, 3>& sizes, std::uint64_t seed) {
  const std::size_t need = sizes[0] + sizes[1] + sizes[2];
  if (need > count) {
    throw ConfigError(fmt::format("split {}/{}/{} needs {} samples but only {} are available", sizes[0], sizes[1],
                                  sizes[2], need, count));
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  DatasetSplit s;
  auto it = order.begin();
  s.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  s.val.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  s.test.assign(it, it + static_cast<std::ptrdiff_t>(sizes[2]));
  return s;
}

std::array<std::size_t, 3> foul_counts(const DatasetSplit& split, std::span<const Label> labels) {
  auto count = [&](const std::vector<std::size_t>& idx) {
    std::size_t n = 0;
    for (auto i : idx) n += labels[i] == Label::Foul ? 1 : 0;
    return n;
  };
  return {count(split.train), count(split.val), count(split.test)};
}

// ---------------------------------------------------------------------------
// Training and evaluation

namespace {

std::size_t count_correct(const nn::Tensor<float>& logits, const std::vector<int>& labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = logits.data[2 * i + 1] > logits.data[2 * i] ? 1 : 0;
    correct += pred == labels[i] ? 1 : 0;
  }
  return correct;
}

struct Snapshot {
  std::vector<nn::AlignedVector<float>> values;

  void capture(FutureFoulNet<float>& model) {
    values.clear();
    auto list = model.parameters();
    for (auto* p : list.params) values.push_back(p->value.data);
    for (auto* b : list.buffers) values.push_back(b->value.data);
  }

  void restore(FutureFoulNet<float>& model) const {
    auto list = model.parameters();
    std::size_t k = 0;
    for (auto* p : list.params) p->value.data = values[k++];
    for (auto* b : list.buffers) b->value.data = values[k++];
  }
};

}  // namespace

Evaluation evaluate(FutureFoulNet<float>& model, std::span<const Sample* const> samples, int batch_size) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty sample set");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  Evaluation ev;
  std::vector<Label> actual;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t m = std::min(samples.size() - start, static_cast<std::size_t>(batch_size));
    const auto part = samples.subspan(start, m);
    const auto batch = make_batch<float>(part, model.model_config());
    const auto logits = model.forward(batch, Mode::Eval);
    loss_sum += nn::cross_entropy<float>(logits, batch.labels, nullptr) * static_cast<double>(m);
    const auto probs = foul_probability(logits);
    for (std::size_t i = 0; i < m; ++i) {
      ev.foul_probability.push_back(probs[i]);
      ev.predicted.push_back(logits.data[2 * i + 1] > logits.data[2 * i] ? Label::Foul : Label::NonFoul);
      actual.push_back(part[i]->label);
    }
  }
  ev.loss = loss_sum / static_cast<double>(samples.size());
  ev.metrics = compute_metrics(ev.predicted, actual);
  return ev;
}

TrainOutcome train(FutureFoulNet<float>& model, std::span<const Sample* const> train_set,
                   std::span<const Sample* const> val, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (val.empty()) throw ConfigError("validation set is empty");

  Rng order_rng(config.seed ^ 0x5851f42d4c957f2dULL);
  model.set_dropout_seed(config.seed ^ 0x14057b7ef767814fULL);
  nn::Adam<float> optimizer(model.parameters().params, config.lr);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const Sample*> batch_samples;

  TrainOutcome outcome;
  Snapshot best;
  bool have_best = false;
  const auto bs = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += bs, ++batch_index) {
      const std::size_t m = std::min(order.size() - start, bs);
      batch_samples.clear();
      for (std::size_t i = 0; i < m; ++i) batch_samples.push_back(train_set[order[start + i]]);
      const auto batch = make_batch<float>(batch_samples, model.model_config());
      optimizer.zero_grad();
      const auto logits = model.forward(batch, Mode::Train);
      nn::Tensor<float> grad;
      const double loss = nn::cross_entropy(logits, batch.labels, &grad);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(fmt::format("loss became non-finite at epoch {} batch {}", epoch, batch_index), epoch,
                               batch_index);
      }
      model.backward(grad);
      optimizer.step();
      loss_sum += loss * static_cast<double>(m);
      correct += count_correct(logits, batch.labels);
    }

    const Evaluation ev = evaluate(model, val, config.batch_size);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.train_acc = 100.0 * static_cast<double>(correct) / static_cast<double>(train_set.size());
    rec.val_loss = ev.loss;
    rec.val_acc = ev.metrics.accuracy;
    if (!std::isfinite(rec.val_loss)) {
      throw TrainingDiverged(fmt::format("validation loss became non-finite at epoch {}", epoch), epoch, -1);
    }
    outcome.history.epochs.push_back(rec);
    if (!have_best || rec.val_acc > outcome.best_val_accuracy) {
      have_best = true;
      outcome.best_epoch = epoch;
      outcome.best_val_accuracy = rec.val_acc;
      best.capture(model);
    }
    if (on_epoch) on_epoch(rec);
  }
  best.restore(model);
  return outcome;
}

}  // namespace futurefoul
