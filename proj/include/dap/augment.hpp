#pragma once

// Event augmentation: POI proximity flags under per-type distance thresholds,
// threshold calibration by Jaccard correlation against regex annotations, and
// weather joining by nearest station / nearest report time.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dap/geo.hpp"
#include "dap/patterns.hpp"
#include "dap/records.hpp"

namespace dap {

// ---------------------------------------------------------------------------
// Threshold table: POI type -> association radius in meters.
// ---------------------------------------------------------------------------

struct ThresholdTable {
  std::array<double, kPoiTypeCount> radius_m{};

  double operator[](PoiType t) const { return radius_m[static_cast<int>(t)]; }
  double& operator[](PoiType t) { return radius_m[static_cast<int>(t)]; }

  void validate() const {
    for (int i = 0; i < kPoiTypeCount; ++i)
      if (!(radius_m[i] > 0.0))
        fail(Errc::config, std::string("threshold for '") +
                               std::string(kPoiTypeNames[i]) + "' must be > 0");
  }

  // Junction-family types share the junction radius; every other type uses the
  // intersection radius.
  static ThresholdTable from_family_radii(double intersection_m, double junction_m) {
    ThresholdTable tt;
    for (int i = 0; i < kPoiTypeCount; ++i) tt.radius_m[i] = intersection_m;
    for (PoiType t : {PoiType::junction, PoiType::amenity, PoiType::no_exit})
      tt[t] = junction_m;
    return tt;
  }

  static ThresholdTable defaults() { return from_family_radii(30.0, 100.0); }
};

// POI types whose presence marks the given annotation family.
inline std::vector<PoiType> family_poi_types(AnnotationTarget family) {
  if (family == AnnotationTarget::junction) return {PoiType::junction};
  return {PoiType::crossing, PoiType::stop, PoiType::traffic_signal};
}

// ---------------------------------------------------------------------------
// PoiIndex: spatial index over a POI list (item id = position in the list).
// ---------------------------------------------------------------------------

struct PoiIndex {
  std::vector<PoiRecord> pois;
  SpatialIndex index;

  static PoiIndex build(std::vector<PoiRecord> list) {
    PoiIndex pi;
    pi.pois = std::move(list);
    std::vector<SpatialIndex::Item> items;
    items.reserve(pi.pois.size());
    for (std::size_t i = 0; i < pi.pois.size(); ++i)
      items.push_back({pi.pois[i].location, static_cast<std::int64_t>(i)});
    pi.index = SpatialIndex(std::move(items));
    return pi;
  }
};

// Flag per POI type: at least one POI of that type within its threshold.
inline std::array<bool, kPoiTypeCount> annotate_poi(const EventRecord& e, const PoiIndex& pi,
                                                    const ThresholdTable& tt) {
  tt.validate();
  std::array<bool, kPoiTypeCount> flags{};
  if (pi.pois.empty()) return flags;
  double max_r = 0.0;
  for (double r : tt.radius_m) max_r = std::max(max_r, r);
  for (const auto& hit : pi.index.within_radius(e.location, max_r)) {
    const PoiType t = pi.pois[hit.index].ptype;
    if (hit.distance_m <= tt[t]) flags[static_cast<int>(t)] = true;
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Jaccard similarity; two empty sets score 0 by convention.
// ---------------------------------------------------------------------------

template <typename T>
double jaccard(const std::set<T>& s1, const std::set<T>& s2) {
  if (s1.empty() && s2.empty()) return 0.0;
  std::size_t inter = 0;
  auto it1 = s1.begin();
  auto it2 = s2.begin();
  while (it1 != s1.end() && it2 != s2.end()) {
    if (*it1 < *it2) ++it1;
    else if (*it2 < *it1) ++it2;
    else {
      ++inter;
      ++it1;
      ++it2;
    }
  }
  const std::size_t uni = s1.size() + s2.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// Threshold calibration: score each candidate radius by the Jaccard overlap
// between regex-annotated accidents (S1) and proximity-annotated accidents
// (S2), then keep the argmax (smallest radius on ties).
// ---------------------------------------------------------------------------

struct CalibrationResult {
  std::vector<double> candidate_radii;
  std::vector<double> jaccard_scores;
  double best_radius = 0.0;
};

inline const std::vector<double>& default_candidate_radii() {
  static const std::vector<double> kRadii = {5,  10,  15,  20,  25,  30,  40,  50, 75,
                                             100, 125, 150, 200, 250, 300, 400, 500};
  return kRadii;
}

inline CalibrationResult calibrate_threshold(const std::vector<EventRecord>& accidents,
                                             const std::vector<PoiRecord>& pois,
                                             AnnotationTarget family, const PatternSet& ps,
                                             const std::vector<double>& candidates =
                                                 default_candidate_radii()) {
  if (accidents.empty()) fail(Errc::empty_input, "calibrate_threshold: no accidents");
  if (candidates.empty()) fail(Errc::config, "calibrate_threshold: no candidate radii");
  for (double c : candidates)
    if (!(c > 0.0)) fail(Errc::config, "calibrate_threshold: candidate radii must be > 0");

  // S1: regex-annotated accident indices.
  std::set<std::size_t> s1;
  for (std::size_t i = 0; i < accidents.size(); ++i)
    if (match_patterns(accidents[i].description, ps).has(family)) s1.insert(i);

  // Distance from each accident to the closest family-type POI.
  std::vector<SpatialIndex::Item> items;
  const auto types = family_poi_types(family);
  for (std::size_t i = 0; i < pois.size(); ++i) {
    for (PoiType t : types)
      if (pois[i].ptype == t) {
        items.push_back({pois[i].location, static_cast<std::int64_t>(i)});
        break;
      }
  }
  std::vector<double> min_dist(accidents.size(), std::numeric_limits<double>::infinity());
  if (!items.empty()) {
    SpatialIndex idx(std::move(items));
    for (std::size_t i = 0; i < accidents.size(); ++i)
      min_dist[i] = idx.nearest(accidents[i].location).distance_m;
  }

  CalibrationResult result;
  result.candidate_radii = candidates;
  result.jaccard_scores.reserve(candidates.size());
  bool have_best = false;
  double best_score = 0.0;
  for (double tau : candidates) {
    std::set<std::size_t> s2;
    for (std::size_t i = 0; i < accidents.size(); ++i)
      if (min_dist[i] <= tau) s2.insert(i);
    const double score = jaccard(s1, s2);
    result.jaccard_scores.push_back(score);
    if (!have_best || score > best_score ||
        (score == best_score && tau < result.best_radius)) {
      have_best = true;
      best_score = score;
      result.best_radius = tau;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Weather stations and event-to-weather joining.
// ---------------------------------------------------------------------------

struct WeatherStations {
  struct Station {
    std::string id;
    GeoPoint pos;
    std::vector<WeatherRecord> records;  // time-sorted
  };

  std::vector<Station> stations;  // sorted by station id
  SpatialIndex index;             // item id = position in stations

  bool empty() const { return stations.empty(); }

  static WeatherStations build(const std::vector<WeatherRecord>& records) {
    WeatherStations ws;
    std::map<std::string, std::vector<WeatherRecord>> grouped;
    for (const auto& r : records) grouped[r.station_id].push_back(r);
    for (auto& [id, recs] : grouped) {
      // Total order on records makes the join invariant under input order;
      // exact duplicates are indistinguishable so their order is irrelevant.
      std::sort(recs.begin(), recs.end(), [](const WeatherRecord& a, const WeatherRecord& b) {
        if (a.time != b.time) return a.time < b.time;
        auto key = [](const WeatherRecord& w) {
          return std::make_tuple(w.temperature, w.humidity, w.pressure, w.visibility, w.wind_speed,
                                 w.precipitation, w.rain, w.snow, w.fog, w.hail);
        };
        return key(a) < key(b);
      });
      Station s;
      s.id = id;
      s.pos = recs.front().location;
      s.records = std::move(recs);
      ws.stations.push_back(std::move(s));
    }
    std::vector<SpatialIndex::Item> items;
    for (std::size_t i = 0; i < ws.stations.size(); ++i)
      items.push_back({ws.stations[i].pos, static_cast<std::int64_t>(i)});
    ws.index = SpatialIndex(std::move(items));
    return ws;
  }

  // Record from this station with report time closest to t (earlier wins ties).
  static const WeatherRecord& closest_in_time(const Station& s, UtcTime t) {
    const auto& recs = s.records;
    auto it = std::lower_bound(recs.begin(), recs.end(), t,
                               [](const WeatherRecord& r, UtcTime v) { return r.time < v; });
    if (it == recs.begin()) return *it;
    if (it == recs.end()) return recs.back();
    const auto& later = *it;
    const auto& earlier = *std::prev(it);
    const std::int64_t d_earlier = t - earlier.time;
    const std::int64_t d_later = later.time - t;
    return d_earlier <= d_later ? earlier : later;
  }
};

struct WeatherJoin {
  WeatherRecord record;
  double lag_minutes = 0.0;
};

inline WeatherJoin join_weather_at(const GeoPoint& where, UtcTime when,
                                   const WeatherStations& st) {
  if (st.empty()) fail(Errc::empty_index, "join_weather: no weather stations");
  const auto hit = st.index.nearest(where);
  const auto& station = st.stations[hit.index];
  const WeatherRecord& rec = WeatherStations::closest_in_time(station, when);
  WeatherJoin j;
  j.record = rec;
  j.lag_minutes = std::abs(static_cast<double>(when - rec.time)) / 60.0;
  return j;
}

inline WeatherJoin join_weather(const EventRecord& e, const WeatherStations& st) {
  return join_weather_at(e.location, e.start_time, st);
}

}  // namespace dap
