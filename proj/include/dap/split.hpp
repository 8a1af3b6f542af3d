#pragma once

// Temporal train/validation/test split and train-only feature normalization.
//
// Entries are split by window_start: the first train_weeks go to training
// (an entry exactly on the boundary goes to test), the following test_weeks
// to test. Validation is the chronologically-last fraction of the training
// pool. Continuous interval features (traffic counts and continuous weather)
// are z-scored with statistics from the training entries only, pooled across
// the window's steps; indicator features and statics pass through untouched.
// Remaining missing weather values impute to the train feature mean.

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "dap/windows.hpp"

namespace dap {

struct NormalizationStats {
  std::vector<int> scaled_indices;  // positions within the interval block
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 marks a zero-variance feature (left unscaled)

  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;

  nlohmann::json to_json() const {
    return nlohmann::json{{"scaled_indices", scaled_indices}, {"mean", mean}, {"stddev", stddev}};
  }
  static NormalizationStats from_json(const nlohmann::json& j) {
    NormalizationStats s;
    s.scaled_indices = j.at("scaled_indices").get<std::vector<int>>();
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    return s;
  }
};

struct DatasetSplit {
  FeatureLayout layout;
  std::vector<SampleEntry> train;
  std::vector<SampleEntry> validation;
  std::vector<SampleEntry> test;
  NormalizationStats stats;
};

namespace splitdetail {

// Interval-block feature positions subject to z-scoring: the traffic counts
// and the continuous weather fields (indicators are exempt).
inline std::vector<int> scaled_interval_indices(const FeatureLayout& layout) {
  std::vector<int> idx;
  for (int i = 0; i < layout.traffic; ++i) idx.push_back(i);
  const int weather_base = layout.traffic + layout.time;
  const int cont = std::min(layout.weather, kWeatherContinuous);
  for (int i = 0; i < cont; ++i) idx.push_back(weather_base + i);
  return idx;
}

inline NormalizationStats compute_stats(const std::vector<SampleEntry>& train,
                                        const FeatureLayout& layout) {
  NormalizationStats stats;
  stats.scaled_indices = scaled_interval_indices(layout);
  const std::size_t k = stats.scaled_indices.size();
  std::vector<double> sum(k, 0.0), sumsq(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  const int dim = layout.interval_dim();
  for (const auto& e : train) {
    for (int s = 0; s < layout.steps; ++s) {
      const double* block = e.dynamics.data() + static_cast<std::size_t>(s) * dim;
      for (std::size_t f = 0; f < k; ++f) {
        const double v = block[stats.scaled_indices[f]];
        if (std::isnan(v)) continue;
        sum[f] += v;
        sumsq[f] += v * v;
        ++count[f];
      }
    }
  }
  stats.mean.resize(k, 0.0);
  stats.stddev.resize(k, 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    if (count[f] == 0) continue;
    const double m = sum[f] / static_cast<double>(count[f]);
    const double var = std::max(0.0, sumsq[f] / static_cast<double>(count[f]) - m * m);
    stats.mean[f] = m;
    stats.stddev[f] = std::sqrt(var);
  }
  return stats;
}

}  // namespace splitdetail

// Applies z-scoring in place; NaN becomes the train mean (0 after scaling).
inline void apply_normalization(std::vector<SampleEntry>& entries, const NormalizationStats& stats,
                                const FeatureLayout& layout) {
  const int dim = layout.interval_dim();
  for (auto& e : entries) {
    for (int s = 0; s < layout.steps; ++s) {
      double* block = e.dynamics.data() + static_cast<std::size_t>(s) * dim;
      for (std::size_t f = 0; f < stats.scaled_indices.size(); ++f) {
        double& v = block[stats.scaled_indices[f]];
        if (std::isnan(v)) v = stats.mean[f];
        if (stats.stddev[f] > 0.0) v = (v - stats.mean[f]) / stats.stddev[f];
      }
    }
  }
}

struct SplitParams {
  double train_weeks = 10.0;
  double test_weeks = 2.0;
  double val_fraction = 0.1;

  friend bool operator==(const SplitParams&, const SplitParams&) = default;
};

inline DatasetSplit temporal_split(std::vector<SampleEntry> entries, const FeatureLayout& layout,
                                   const SplitParams& params = {}) {
  if (entries.empty()) fail(Errc::empty_input, "temporal_split: no entries");
  if (!(params.train_weeks > 0) || !(params.test_weeks > 0))
    fail(Errc::config, "temporal_split: week counts must be > 0");
  if (params.val_fraction < 0.0 || params.val_fraction >= 1.0)
    fail(Errc::config, "temporal_split: val_fraction must be in [0, 1)");

  std::sort(entries.begin(), entries.end(), [](const SampleEntry& a, const SampleEntry& b) {
    if (a.window_start != b.window_start) return a.window_start < b.window_start;
    return a.region_index < b.region_index;
  });

  const UtcTime t0 = entries.front().window_start;
  const UtcTime t_last = entries.back().window_start;
  const double week_s = 7.0 * 86400.0;
  // Entries must span the requested train+test range (one day of slack for
  // the trailing window positions a timeline cannot produce).
  const double required_s = (params.train_weeks + params.test_weeks) * week_s - 86400.0;
  if (static_cast<double>(t_last - t0) < required_s)
    fail(Errc::span_error, "entries span " +
                               format_double(static_cast<double>(t_last - t0) / week_s) +
                               " weeks; need " +
                               format_double(params.train_weeks + params.test_weeks));

  const UtcTime boundary = t0 + static_cast<UtcTime>(params.train_weeks * week_s);
  const UtcTime test_end = boundary + static_cast<UtcTime>(params.test_weeks * week_s);

  DatasetSplit split;
  split.layout = layout;
  std::vector<SampleEntry> train_pool;
  for (auto& e : entries) {
    if (e.window_start < boundary) train_pool.push_back(std::move(e));
    else if (e.window_start < test_end) split.test.push_back(std::move(e));
  }
  if (train_pool.empty()) fail(Errc::span_error, "temporal_split: empty training pool");
  if (split.test.empty()) fail(Errc::span_error, "temporal_split: empty test set");

  // Chronologically-last fraction of the training pool becomes validation.
  const std::size_t n_val =
      static_cast<std::size_t>(std::ceil(params.val_fraction * train_pool.size()));
  const std::size_t n_train = train_pool.size() - n_val;
  split.train.assign(std::make_move_iterator(train_pool.begin()),
                     std::make_move_iterator(train_pool.begin() + n_train));
  split.validation.assign(std::make_move_iterator(train_pool.begin() + n_train),
                          std::make_move_iterator(train_pool.end()));

  split.stats = splitdetail::compute_stats(split.train, layout);
  apply_normalization(split.train, split.stats, layout);
  apply_normalization(split.validation, split.stats, layout);
  apply_normalization(split.test, split.stats, layout);
  return split;
}

}  // namespace dap
