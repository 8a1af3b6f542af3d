#pragma once

// Mini-batch Adam training with validation-loss early stopping. The best
// validation snapshot (parameters + batchnorm buffers) is restored into the
// model when training ends.

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dap/models.hpp"
#include "dap/split.hpp"

namespace dap {

struct TrainConfig {
  int epochs = 60;
  int patience = 10;  // consecutive non-improving validation epochs tolerated
  double min_delta = 0.0;  // improvement below this does not reset patience
  double lr = 0.01;
  int batch_size = 64;
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;

  void validate() const {
    if (epochs < 1) fail(Errc::config, "train: epochs must be >= 1");
    if (patience < 0 || patience >= epochs)
      fail(Errc::config, "train: patience must be in [0, epochs)");
    if (batch_size < 1) fail(Errc::config, "train: batch_size must be >= 1");
    if (!(lr > 0.0)) fail(Errc::config, "train: learning rate must be > 0");
    if (min_delta < 0.0) fail(Errc::config, "train: min_delta must be >= 0");
    if (seeds.empty()) fail(Errc::config, "train: need at least one seed");
  }
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int adam_steps = 0;
};

namespace traindetail {

struct Snapshot {
  std::vector<Matrix2D> values;
  std::vector<Matrix2D> buffer_values;
};

inline Snapshot take_snapshot(Model& m) {
  Snapshot s;
  for (nn::Param* p : m.parameters()) s.values.push_back(p->value);
  for (const auto& b : m.buffers()) s.buffer_values.push_back(*b.mat);
  return s;
}

inline void restore_snapshot(Model& m, const Snapshot& s) {
  auto params = m.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = s.values[i];
  auto buffers = m.buffers();
  for (std::size_t i = 0; i < buffers.size(); ++i) *buffers[i].mat = s.buffer_values[i];
}

inline double dataset_loss(Model& m, const std::vector<SampleEntry>& entries,
                           const FeatureLayout& layout, std::size_t batch_size) {
  if (entries.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  std::vector<const SampleEntry*> chunk;
  for (std::size_t begin = 0; begin < entries.size(); begin += batch_size) {
    const std::size_t end = std::min(entries.size(), begin + batch_size);
    chunk.clear();
    for (std::size_t i = begin; i < end; ++i) chunk.push_back(&entries[i]);
    const Batch b = make_batch(chunk, layout, m.wants_branches(), !m.wants_branches());
    total += m.loss_only(b, Mode::eval) * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(entries.size());
}

}  // namespace traindetail

inline TrainResult train_model(Model& m, const DatasetSplit& split, const TrainConfig& tc,
                               std::uint64_t seed) {
  tc.validate();
  if (split.train.empty()) fail(Errc::empty_input, "train: empty training set");

  RngStream shuffle_rng = RngStream(seed).fork(0x7261696e);
  const nn::AdamConfig adam{tc.lr, 0.9, 0.999, 1e-8};
  auto params = m.parameters();

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  traindetail::Snapshot best;
  int bad_epochs = 0;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::vector<const SampleEntry*> chunk;
    std::size_t begin = 0;
    while (begin < order.size()) {
      std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(tc.batch_size));
      // Avoid a trailing single-row batch, which batchnorm cannot normalize;
      // attach it to the previous chunk instead.
      if (order.size() - end == 1) end = order.size();
      chunk.clear();
      for (std::size_t i = begin; i < end; ++i) chunk.push_back(&split.train[order[i]]);
      const Batch b = make_batch(chunk, split.layout, m.wants_branches(), !m.wants_branches());
      nn::zero_grads(params);
      const double loss = m.loss_and_grad(b, Mode::train) + m.regularization_loss();
      nn::adam_step(params, adam, ++result.adam_steps);
      loss_sum += loss * static_cast<double>(end - begin);
      begin = end;
    }
    const double train_loss = loss_sum / static_cast<double>(order.size());
    if (std::isnan(train_loss))
      fail(Errc::divergence, "training loss is NaN at epoch " + std::to_string(epoch));

    double val_loss = traindetail::dataset_loss(m, split.validation, split.layout,
                                                static_cast<std::size_t>(tc.batch_size));
    if (split.validation.empty()) val_loss = train_loss;  // degenerate split
    if (std::isnan(val_loss))
      fail(Errc::divergence, "validation loss is NaN at epoch " + std::to_string(epoch));

    result.history.push_back(EpochStats{epoch, train_loss, val_loss});

    const bool improved = val_loss < result.best_val_loss - tc.min_delta;
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      best = traindetail::take_snapshot(m);
    }
    if (improved) {
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs > tc.patience) break;
    }
  }

  if (result.best_epoch > 0) traindetail::restore_snapshot(m, best);
  return result;
}

}  // namespace dap
