#pragma once

// Sample entries: 8 observed intervals plus region statics, labeled by
// accident occurrence in the following interval. Includes negative sampling
// and the sample-file CSV format.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dap/csv.hpp"
#include "dap/features.hpp"

namespace dap {

// Widths of each feature category. Ablation shrinks categories to zero;
// models are built against whatever layout the dataset carries.
struct FeatureLayout {
  int traffic = kTrafficDim;
  int time = kTimeDim;
  int weather = kWeatherDim;
  int poi = kPoiTypeCount;
  int desc2vec = kDesc2VecDim;
  int steps = 8;

  int interval_dim() const { return traffic + time + weather; }
  int statics_dim() const { return poi + desc2vec; }
  int total_dim() const { return statics_dim() + steps * interval_dim(); }

  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

struct SampleEntry {
  int region_index = 0;
  UtcTime window_start = 0;  // start of the oldest observed interval
  std::vector<double> statics;   // POI counts then Desc2Vec (layout order)
  std::vector<double> dynamics;  // steps x interval_dim, oldest first
  int label = 0;

  friend bool operator==(const SampleEntry&, const SampleEntry&) = default;
};

// Flattened feature vector: statics then dynamics (f0..f{total-1}).
inline std::vector<double> flatten(const SampleEntry& e) {
  std::vector<double> out;
  out.reserve(e.statics.size() + e.dynamics.size());
  out.insert(out.end(), e.statics.begin(), e.statics.end());
  out.insert(out.end(), e.dynamics.begin(), e.dynamics.end());
  return out;
}

// ---------------------------------------------------------------------------
// Window construction: one entry per position, dynamics = intervals
// [i, i+7], label from interval i+8. A timeline of T intervals yields T-8
// entries.
// ---------------------------------------------------------------------------

inline std::vector<SampleEntry> make_windows(int region_index, UtcTime timeline_start,
                                             const std::vector<IntervalVector>& timeline,
                                             const RegionStatics& statics,
                                             const FeatureLayout& layout = {}) {
  const int window = layout.steps;
  if (static_cast<int>(timeline.size()) < window + 1)
    fail(Errc::too_short, "timeline has " + std::to_string(timeline.size()) +
                              " intervals; need at least " + std::to_string(window + 1));

  const auto statics_flat = statics.flatten();
  const std::size_t n_entries = timeline.size() - window;
  std::vector<SampleEntry> entries;
  entries.reserve(n_entries);
  for (std::size_t i = 0; i < n_entries; ++i) {
    SampleEntry e;
    e.region_index = region_index;
    e.window_start = timeline_start + static_cast<UtcTime>(i) * kIntervalSeconds;
    e.statics.assign(statics_flat.begin(), statics_flat.end());
    e.dynamics.reserve(static_cast<std::size_t>(window) * kIntervalDim);
    for (int s = 0; s < window; ++s) {
      const auto flat = timeline[i + s].flatten();
      e.dynamics.insert(e.dynamics.end(), flat.begin(), flat.end());
    }
    // Label: at least one accident in the interval following the window.
    e.label = timeline[i + window].traffic[static_cast<int>(EventType::accident)] > 0.0 ? 1 : 0;
    entries.push_back(std::move(e));
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Negative sampling: keep every positive, keep each negative independently
// with probability keep_prob under the seeded stream.
// ---------------------------------------------------------------------------

inline std::vector<SampleEntry> negative_sample(std::vector<SampleEntry> entries,
                                                double keep_prob, std::uint64_t seed) {
  if (!(keep_prob > 0.0) || keep_prob > 1.0)
    fail(Errc::config, "negative sampling probability must be in (0, 1]");
  RngStream rng(seed);
  std::vector<SampleEntry> kept;
  kept.reserve(entries.size());
  for (auto& e : entries) {
    if (e.label == 1) {
      kept.push_back(std::move(e));
      continue;
    }
    if (rng.next_double() < keep_prob) kept.push_back(std::move(e));
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Sample file: region_index,window_start,label,f0..f{total-1}
// ---------------------------------------------------------------------------

inline void write_samples(std::ostream& out, const std::vector<SampleEntry>& entries,
                          const FeatureLayout& layout) {
  std::vector<std::string> header = {"region_index", "window_start", "label"};
  for (int i = 0; i < layout.total_dim(); ++i) header.push_back("f" + std::to_string(i));
  csv_write_row(out, header);
  std::vector<std::string> fields;
  for (const auto& e : entries) {
    fields.clear();
    fields.push_back(std::to_string(e.region_index));
    fields.push_back(format_time(e.window_start));
    fields.push_back(std::to_string(e.label));
    for (double v : e.statics) fields.push_back(format_double(v));
    for (double v : e.dynamics) fields.push_back(format_double(v));
    csv_write_row(out, fields);
  }
}

inline std::vector<SampleEntry> read_samples(std::istream& in, const FeatureLayout& layout) {
  CsvReader reader(in);
  CsvRow row;
  if (!reader.next(row)) fail(Errc::schema_error, "sample file: missing header");
  const std::size_t expect = 3 + static_cast<std::size_t>(layout.total_dim());
  if (row.fields.size() != expect)
    fail(Errc::schema_error, "sample file: expected " + std::to_string(expect) +
                                 " columns, found " + std::to_string(row.fields.size()));
  std::vector<SampleEntry> entries;
  const std::size_t n_statics = static_cast<std::size_t>(layout.statics_dim());
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != expect)
      fail(Errc::row_error, "sample file line " + std::to_string(row.line) + ": bad field count");
    SampleEntry e;
    std::int64_t ri = 0, label = 0;
    if (!try_parse_int(row.fields[0], ri))
      fail(Errc::row_error, "sample file line " + std::to_string(row.line) + ": bad region index");
    e.region_index = static_cast<int>(ri);
    e.window_start = parse_time(row.fields[1]);
    if (!try_parse_int(row.fields[2], label) || (label != 0 && label != 1))
      fail(Errc::row_error, "sample file line " + std::to_string(row.line) + ": bad label");
    e.label = static_cast<int>(label);
    e.statics.reserve(n_statics);
    e.dynamics.reserve(expect - 3 - n_statics);
    for (std::size_t i = 3; i < expect; ++i) {
      double v = 0;
      if (!try_parse_double(row.fields[i], v))
        fail(Errc::row_error, "sample file line " + std::to_string(row.line) + ": bad value");
      if (i - 3 < n_statics) e.statics.push_back(v);
      else e.dynamics.push_back(v);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace dap
