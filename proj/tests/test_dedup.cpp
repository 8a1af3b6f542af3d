#include <doctest.h>

#include <functional>
#include <map>
#include <set>

#include "dap/dedup.hpp"
#include "support/oracles.hpp"

using namespace dap;

namespace {

EventRecord make_event(std::string id, EventType t, GeoPoint loc, UtcTime start,
                       Source src = Source::mapquest_like) {
  EventRecord e;
  e.id = std::move(id);
  e.etype = t;
  e.location = loc;
  e.start_time = start;
  e.end_time = start + 600;
  e.source = src;
  e.description = "event " + e.id;
  return e;
}

std::set<std::string> ids_of(const std::vector<EventRecord>& evs) {
  std::set<std::string> s;
  for (const auto& e : evs) s.insert(e.id);
  return s;
}

// Brute-force pairwise linkage closure, coded independently of the library's
// sliding-window implementation.
std::set<std::string> brute_survivors(const std::vector<EventRecord>& evs, double dist_m,
                                      double time_min) {
  const std::size_t n = evs.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (evs[i].etype != evs[j].etype) continue;
      const double dt = std::abs(static_cast<double>(evs[i].start_time - evs[j].start_time)) / 60.0;
      if (dt >= time_min) continue;
      if (haversine_distance(evs[i].location, evs[j].location) >= dist_m) continue;
      parent[find(i)] = find(j);
    }
  std::map<std::size_t, std::size_t> rep;
  auto better = [&](std::size_t a, std::size_t b) {
    const auto& x = evs[a];
    const auto& y = evs[b];
    if (x.start_time != y.start_time) return x.start_time < y.start_time;
    if (x.source != y.source) return x.source < y.source;
    return x.id < y.id;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    auto it = rep.find(r);
    if (it == rep.end() || better(i, it->second)) rep[r] = i;
  }
  std::set<std::string> out;
  for (auto& [root, i] : rep) out.insert(evs[i].id);
  return out;
}

}  // namespace

TEST_CASE("two accidents 100m and 5min apart merge to one survivor") {
  const GeoPoint base{40.0, -83.0};
  std::vector<EventRecord> evs;
  evs.push_back(make_event("A", EventType::accident, base, 1000));
  evs.push_back(make_event("B", EventType::accident, oracles::offset_point(base, 100, 0),
                           1000 + 300, Source::bing_like));
  auto [out, report] = deduplicate(evs);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "A");
  CHECK(report.total_in == 2);
  CHECK(report.duplicates_removed == 1);
  CHECK(report.clusters_merged == 1);
  CHECK(report.duplicate_fraction == 0.5);
}

TEST_CASE("300m apart stays two; different etype stays two") {
  const GeoPoint base{40.0, -83.0};
  std::vector<EventRecord> far;
  far.push_back(make_event("A", EventType::accident, base, 1000));
  far.push_back(make_event("B", EventType::accident, oracles::offset_point(base, 300, 0), 1300));
  CHECK(deduplicate(far).first.size() == 2);

  std::vector<EventRecord> mixed;
  mixed.push_back(make_event("A", EventType::accident, base, 1000));
  mixed.push_back(make_event("B", EventType::congestion, base, 1000));
  CHECK(deduplicate(mixed).first.size() == 2);
}

TEST_CASE("thresholds are strict: exactly 250m / exactly 10min do not link") {
  const GeoPoint base{40.0, -83.0};
  std::vector<EventRecord> at_dist;
  at_dist.push_back(make_event("A", EventType::accident, base, 1000));
  at_dist.push_back(
      make_event("B", EventType::accident, oracles::offset_point(base, 250.0001, 0), 1000));
  CHECK(deduplicate(at_dist).first.size() == 2);

  std::vector<EventRecord> at_time;
  at_time.push_back(make_event("A", EventType::accident, base, 1000));
  at_time.push_back(make_event("B", EventType::accident, base, 1000 + 600));
  CHECK(deduplicate(at_time).first.size() == 2);
}

TEST_CASE("transitive chain A-B-C collapses to one survivor") {
  const GeoPoint base{40.0, -83.0};
  std::vector<EventRecord> evs;
  evs.push_back(make_event("A", EventType::accident, base, 1000));
  evs.push_back(make_event("B", EventType::accident, oracles::offset_point(base, 200, 0), 1060));
  evs.push_back(make_event("C", EventType::accident, oracles::offset_point(base, 400, 0), 1120));
  // sanity: A-C alone would not link
  CHECK(haversine_distance(evs[0].location, evs[2].location) > 250.0);
  auto [out, report] = deduplicate(evs);
  CHECK(out.size() == 1);
  CHECK(ids_of(out) == brute_survivors(evs, 250, 10));
}

TEST_CASE("empty input produces empty output with zero report") {
  auto [out, report] = deduplicate({});
  CHECK(out.empty());
  CHECK(report.total_in == 0);
  CHECK(report.duplicates_removed == 0);
  CHECK(report.duplicate_fraction == 0.0);
}

TEST_CASE("dedup matches brute-force closure and is permutation-invariant") {
  RngStream rng(99);
  for (int corpus = 0; corpus < 25; ++corpus) {
    std::vector<EventRecord> evs;
    const int n_base = 10 + static_cast<int>(rng.next_below(20));
    const GeoPoint city{39.5 + rng.next_uniform(0, 1), -84.0 + rng.next_uniform(0, 1)};
    for (int b = 0; b < n_base; ++b) {
      // bases far apart (>1km) so clusters cannot bridge
      const GeoPoint p = oracles::offset_point(city, b * 1500.0, (b % 5) * 1500.0);
      const UtcTime t = 100000 + b * 3600;
      const auto etype = static_cast<EventType>(rng.next_below(7));
      evs.push_back(make_event("B" + std::to_string(b), etype, p, t));
      const int copies = static_cast<int>(rng.next_below(3));
      for (int c = 0; c < copies; ++c) {
        auto copy = make_event("B" + std::to_string(b) + "c" + std::to_string(c), etype,
                               oracles::offset_point(p, rng.next_uniform(-140, 140),
                                                     rng.next_uniform(-140, 140)),
                               t + 30 + static_cast<UtcTime>(rng.next_below(500)),
                               Source::bing_like);
        evs.push_back(copy);
      }
    }
    const auto want = brute_survivors(evs, 250, 10);
    auto [out1, rep1] = deduplicate(evs);
    CHECK(ids_of(out1) == want);
    CHECK(out1.size() + rep1.duplicates_removed == evs.size());

    // shuffle and re-run: identical survivor list
    auto shuffled = evs;
    rng.shuffle(shuffled);
    auto [out2, rep2] = deduplicate(shuffled);
    CHECK(out2 == out1);
  }
}
