#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dap/split.hpp"
#include "dap/windows.hpp"

using namespace dap;

namespace {

// A timeline with the accident count planted per interval.
std::vector<IntervalVector> timeline_with_accidents(const std::vector<int>& acc_counts) {
  std::vector<IntervalVector> tl(acc_counts.size());
  for (std::size_t i = 0; i < acc_counts.size(); ++i) {
    tl[i].traffic[0] = acc_counts[i];
    tl[i].hour_slot[0] = 1.0;
  }
  return tl;
}

SampleEntry entry_at(UtcTime ws, int label, int region = 0) {
  const FeatureLayout layout;
  SampleEntry e;
  e.region_index = region;
  e.window_start = ws;
  e.label = label;
  e.statics.assign(layout.statics_dim(), 0.0);
  e.dynamics.assign(static_cast<std::size_t>(layout.steps) * layout.interval_dim(), 0.0);
  return e;
}

}  // namespace

TEST_CASE("make_windows entry count law T-8") {
  const RegionStatics statics{};
  CHECK(make_windows(0, 0, timeline_with_accidents(std::vector<int>(9, 0)), statics).size() == 1);
  CHECK(make_windows(0, 0, timeline_with_accidents(std::vector<int>(12, 0)), statics).size() == 4);
  for (int T = 9; T <= 100; ++T) {
    const auto entries = make_windows(0, 0, timeline_with_accidents(std::vector<int>(T, 0)), statics);
    CHECK(entries.size() == static_cast<std::size_t>(T - 8));
  }
  CHECK_THROWS_AS(make_windows(0, 0, timeline_with_accidents(std::vector<int>(8, 0)), statics),
                  Error);
}

TEST_CASE("make_windows labels from the interval after the window") {
  std::vector<int> acc(30, 0);
  acc[20] = 2;  // two accidents still mean label 1
  const auto entries = make_windows(0, 1000000, timeline_with_accidents(acc), RegionStatics{});
  REQUIRE(entries.size() == 22);

  // brute scan: entry i is labeled iff interval i+8 holds an accident
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int want = acc[i + 8] > 0 ? 1 : 0;
    CHECK(entries[i].label == want);
    CHECK(entries[i].window_start == 1000000 + static_cast<UtcTime>(i) * 900);
  }
  // exactly one positive: the window ending at interval 19
  int positives = 0;
  for (const auto& e : entries) positives += e.label;
  CHECK(positives == 1);
  CHECK(entries[12].label == 1);
}

TEST_CASE("make_windows flattens dynamics oldest-first") {
  std::vector<int> acc(10, 0);
  auto tl = timeline_with_accidents(acc);
  for (std::size_t i = 0; i < tl.size(); ++i) tl[i].traffic[2] = static_cast<double>(i);
  const auto entries = make_windows(0, 0, tl, RegionStatics{});
  REQUIRE(entries.size() == 2);
  const FeatureLayout layout;
  // congestion count of step s in entry 1 equals interval index 1+s
  for (int s = 0; s < 8; ++s)
    CHECK(entries[1].dynamics[static_cast<std::size_t>(s) * layout.interval_dim() + 2] == 1.0 + s);
}

TEST_CASE("negative_sample keeps positives and is seed-deterministic") {
  std::vector<SampleEntry> all_pos;
  for (int i = 0; i < 50; ++i) all_pos.push_back(entry_at(i * 900, 1));
  CHECK(negative_sample(all_pos, 0.02, 7).size() == 50);

  std::vector<SampleEntry> mixed;
  for (int i = 0; i < 200; ++i) mixed.push_back(entry_at(i * 900, i % 4 == 0 ? 1 : 0));
  CHECK(negative_sample(mixed, 1.0, 7) == mixed);

  const auto a = negative_sample(mixed, 0.3, 42);
  const auto b = negative_sample(mixed, 0.3, 42);
  CHECK(a == b);
  const auto c = negative_sample(mixed, 0.3, 43);
  CHECK(a != c);

  for (const auto& e : a)
    if (e.label == 1) CHECK(true);
  std::size_t pos_in = 0, pos_out = 0;
  for (const auto& e : mixed) pos_in += e.label;
  for (const auto& e : a) pos_out += e.label;
  CHECK(pos_in == pos_out);

  CHECK_THROWS_AS(negative_sample(mixed, 0.0, 1), Error);
  CHECK_THROWS_AS(negative_sample(mixed, 1.5, 1), Error);
}

TEST_CASE("negative_sample keep-rate stays within 3 binomial sigmas") {
  std::vector<SampleEntry> negatives;
  const int n = 100000;
  negatives.reserve(n);
  for (int i = 0; i < n; ++i) negatives.push_back(entry_at(i * 900, 0));
  const double p = 0.02;
  const auto kept = negative_sample(negatives, p, 12345);
  const double mean = n * p;
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(kept.size()) - mean) <= 3.0 * sigma);
}

TEST_CASE("temporal_split boundaries, validation carve and span error") {
  const FeatureLayout layout;
  const UtcTime t0 = parse_time("2018-06-01T00:00:00Z");
  const double week = 7 * 86400;

  std::vector<SampleEntry> entries;
  // 12 weeks of entries, 4 per day
  for (int d = 0; d < 12 * 7; ++d)
    for (int k = 0; k < 4; ++k)
      entries.push_back(entry_at(t0 + d * 86400 + k * 900, (d + k) % 5 == 0 ? 1 : 0));

  const auto split = temporal_split(entries, layout, SplitParams{10, 2, 0.1});
  const UtcTime boundary = t0 + static_cast<UtcTime>(10 * week);
  for (const auto& e : split.train) CHECK(e.window_start < boundary);
  for (const auto& e : split.validation) CHECK(e.window_start < boundary);
  for (const auto& e : split.test) CHECK(e.window_start >= boundary);

  // validation is the chronological tail of the training pool
  REQUIRE(!split.validation.empty());
  const UtcTime val_min = split.validation.front().window_start;
  for (const auto& e : split.train) CHECK(e.window_start <= val_min);
  const std::size_t pool = split.train.size() + split.validation.size();
  CHECK(split.validation.size() == static_cast<std::size_t>(std::ceil(0.1 * pool)));

  // an entry exactly on the boundary instant goes to test
  bool found_boundary = false;
  for (const auto& e : split.test) found_boundary = found_boundary || e.window_start == boundary;
  CHECK(found_boundary);

  // insufficient span
  std::vector<SampleEntry> narrow(entries.begin(), entries.begin() + 40);
  CHECK_THROWS_AS(temporal_split(narrow, layout, SplitParams{10, 2, 0.1}), Error);
}

TEST_CASE("z-scoring matches hand computation on a 5-entry fixture") {
  FeatureLayout layout;
  layout.steps = 1;
  const UtcTime t0 = parse_time("2018-06-01T00:00:00Z");

  auto make = [&](UtcTime ws, double temperature) {
    SampleEntry e;
    e.window_start = ws;
    e.statics.assign(layout.statics_dim(), 0.0);
    e.dynamics.assign(layout.interval_dim(), 0.0);
    e.dynamics[layout.traffic + layout.time + 0] = temperature;  // temperature slot
    return e;
  };
  std::vector<SampleEntry> entries;
  entries.push_back(make(t0, 10.0));
  entries.push_back(make(t0 + 86400, 12.0));
  entries.push_back(make(t0 + 2 * 86400, 14.0));
  entries.push_back(make(t0 + 3 * 86400, 16.0));
  entries.push_back(make(t0 + 13 * 86400, 20.0));  // lands in test

  const auto split = temporal_split(entries, layout, SplitParams{1, 1, 0.0});
  REQUIRE(split.train.size() == 4);
  REQUIRE(split.test.size() == 1);

  // hand: mean = 13, population std = sqrt(5)
  const int temp_slot = layout.traffic + layout.time;
  const double std5 = std::sqrt(5.0);
  CHECK(split.train[0].dynamics[temp_slot] == doctest::Approx((10.0 - 13.0) / std5));
  CHECK(split.train[3].dynamics[temp_slot] == doctest::Approx((16.0 - 13.0) / std5));
  CHECK(split.test[0].dynamics[temp_slot] == doctest::Approx((20.0 - 13.0) / std5));

  // indicators and statics untouched; zero-variance features unscaled
  CHECK(split.test[0].dynamics[layout.traffic] == 0.0);  // weekday indicator
}

TEST_CASE("normalization imputes missing weather to the train mean") {
  FeatureLayout layout;
  layout.steps = 1;
  const UtcTime t0 = parse_time("2018-06-01T00:00:00Z");
  const int temp_slot = layout.traffic + layout.time;

  auto make = [&](UtcTime ws, double temperature) {
    SampleEntry e;
    e.window_start = ws;
    e.statics.assign(layout.statics_dim(), 0.0);
    e.dynamics.assign(layout.interval_dim(), 0.0);
    e.dynamics[temp_slot] = temperature;
    return e;
  };
  std::vector<SampleEntry> entries;
  entries.push_back(make(t0, 10.0));
  entries.push_back(make(t0 + 86400, std::numeric_limits<double>::quiet_NaN()));
  entries.push_back(make(t0 + 2 * 86400, 14.0));
  entries.push_back(make(t0 + 13 * 86400, std::numeric_limits<double>::quiet_NaN()));

  const auto split = temporal_split(entries, layout, SplitParams{1, 1, 0.0});
  // train mean over {10, 14} = 12, std = 2; NaNs -> mean -> z = 0
  CHECK(split.train[1].dynamics[temp_slot] == 0.0);
  CHECK(split.test[0].dynamics[temp_slot] == 0.0);
  CHECK(split.train[0].dynamics[temp_slot] == doctest::Approx(-1.0));

  // nothing non-finite suvives normalization
  for (const auto& e : split.train)
    for (double v : e.dynamics) CHECK(std::isfinite(v));
}

TEST_CASE("sample file round-trip") {
  const FeatureLayout layout;
  std::vector<SampleEntry> entries;
  RngStream rng(5);
  for (int i = 0; i < 20; ++i) {
    auto e = entry_at(1000000 + i * 900, static_cast<int>(rng.next_below(2)), i % 3);
    for (auto& v : e.statics) v = rng.next_uniform(-2, 2);
    for (auto& v : e.dynamics) v = rng.next_uniform(-2, 2);
    entries.push_back(std::move(e));
  }
  std::ostringstream out;
  write_samples(out, entries, layout);
  std::istringstream in(out.str());
  const auto back = read_samples(in, layout);
  CHECK(back == entries);
}
