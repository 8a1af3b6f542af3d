#pragma once

// Cross-source duplicate removal. Two events of the same type link when both
// their haversine distance and start-time difference fall strictly below the
// thresholds; linkage closes transitively, and each cluster keeps a single
// representative. The result is independent of input order.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "dap/geo.hpp"
#include "dap/records.hpp"

namespace dap {

struct DedupReport {
  std::size_t total_in = 0;
  std::size_t clusters_merged = 0;     // clusters with at least 2 members
  std::size_t duplicates_removed = 0;  // total_in - survivors
  double duplicate_fraction = 0.0;
};

struct DedupParams {
  double dist_threshold_m = 250.0;
  double time_threshold_min = 10.0;

  friend bool operator==(const DedupParams&, const DedupParams&) = default;
};

namespace dedupdetail {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

// Representative ordering: earliest start, then source rank, then id.
// Further fields only break ties between otherwise-identical keys so the
// sort stays a strict weak ordering on arbitrary inputs.
inline bool precedes(const EventRecord& a, const EventRecord& b) {
  if (a.start_time != b.start_time) return a.start_time < b.start_time;
  if (a.source != b.source) return static_cast<int>(a.source) < static_cast<int>(b.source);
  if (a.id != b.id) return a.id < b.id;
  if (a.etype != b.etype) return a.etype < b.etype;
  if (a.location.lat != b.location.lat) return a.location.lat < b.location.lat;
  if (a.location.lng != b.location.lng) return a.location.lng < b.location.lng;
  if (a.end_time != b.end_time) return a.end_time < b.end_time;
  return a.description < b.description;
}

}  // namespace dedupdetail

inline std::pair<std::vector<EventRecord>, DedupReport> deduplicate(
    std::vector<EventRecord> events, const DedupParams& params = {}) {
  if (!(params.dist_threshold_m > 0.0) || !(params.time_threshold_min > 0.0))
    fail(Errc::config, "dedup thresholds must be > 0");

  DedupReport report;
  report.total_in = events.size();
  if (events.empty()) return {std::move(events), report};

  // Canonical order makes the whole procedure permutation-invariant.
  std::vector<EventRecord> sorted = std::move(events);
  std::sort(sorted.begin(), sorted.end(), dedupdetail::precedes);

  const double time_limit_s = params.time_threshold_min * 60.0;
  dedupdetail::UnionFind uf(sorted.size());
  std::size_t window_begin = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (static_cast<double>(sorted[i].start_time - sorted[window_begin].start_time) >=
           time_limit_s)
      ++window_begin;
    for (std::size_t j = window_begin; j < i; ++j) {
      if (sorted[j].etype != sorted[i].etype) continue;
      // |dt| < threshold is guaranteed by the window; check distance.
      if (haversine_distance(sorted[j].location, sorted[i].location) < params.dist_threshold_m)
        uf.unite(j, i);
    }
  }

  // Since the array is sorted by the representative order, the root of each
  // cluster (smallest index) is its representative.
  std::vector<std::size_t> cluster_size(sorted.size(), 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) ++cluster_size[uf.find(i)];

  std::vector<EventRecord> survivors;
  survivors.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (uf.find(i) != i) continue;
    if (cluster_size[i] >= 2) ++report.clusters_merged;
    survivors.push_back(std::move(sorted[i]));
  }
  report.duplicates_removed = report.total_in - survivors.size();
  report.duplicate_fraction =
      report.total_in == 0 ? 0.0
                           : static_cast<double>(report.duplicates_removed) /
                                 static_cast<double>(report.total_in);
  return {std::move(survivors), report};
}

}  // namespace dap
