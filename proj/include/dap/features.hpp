#pragma once

// Feature construction: per-region 15-minute interval vectors (traffic,
// time, weather), time-invariant region statics (POI counts, Desc2Vec), and
// the dense region set over the grid.

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dap/augment.hpp"
#include "dap/geo.hpp"
#include "dap/records.hpp"
#include "dap/solar.hpp"

namespace dap {

inline constexpr int kIntervalSeconds = 900;  // |t| = 15 minutes

inline UtcTime interval_floor(UtcTime t) {
  UtcTime base = t / kIntervalSeconds * kIntervalSeconds;
  if (t < 0 && base > t) base -= kIntervalSeconds;
  return base;
}

// ---------------------------------------------------------------------------
// IntervalVector: 24 time-variant features for one (region, interval).
// Order: traffic counts (7, event-type order), time (weekday, one-hot(5)
// local hour slot, daylight), weather (6 continuous + 4 indicators).
// Missing weather is NaN until normalization imputes it.
// ---------------------------------------------------------------------------

inline constexpr int kTrafficDim = 7;
inline constexpr int kTimeDim = 7;
inline constexpr int kWeatherDim = 10;
inline constexpr int kIntervalDim = kTrafficDim + kTimeDim + kWeatherDim;
inline constexpr int kWeatherContinuous = 6;  // temperature..precipitation

struct IntervalVector {
  std::array<double, kTrafficDim> traffic{};
  double weekday = 0.0;
  std::array<double, 5> hour_slot{};
  double daylight = 0.0;
  // temperature, pressure, humidity, visibility, wind_speed, precipitation,
  // rain, snow, fog, hail
  std::array<double, kWeatherDim> weather{};

  std::array<double, kIntervalDim> flatten() const {
    std::array<double, kIntervalDim> out{};
    int k = 0;
    for (double v : traffic) out[k++] = v;
    out[k++] = weekday;
    for (double v : hour_slot) out[k++] = v;
    out[k++] = daylight;
    for (double v : weather) out[k++] = v;
    return out;
  }
};

// Local civil hour to one-hot slot: [6,10) [10,15) [15,19) [19,22) [22,6).
inline int hour_slot_of(int local_hour) {
  if (local_hour >= 6 && local_hour < 10) return 0;
  if (local_hour >= 10 && local_hour < 15) return 1;
  if (local_hour >= 15 && local_hour < 19) return 2;
  if (local_hour >= 19 && local_hour < 22) return 3;
  return 4;
}

// ---------------------------------------------------------------------------
// Region set: dense indices for every grid cell containing at least one
// event, ordered by (row, col).
// ---------------------------------------------------------------------------

inline std::optional<CellId> try_cell_of(const GeoPoint& p, const GridSpec& g) {
  if (!p.valid()) return std::nullopt;
  const double north = g.meters_north(p);
  const double east = g.meters_east(p);
  const int row = static_cast<int>(std::floor(north / g.cell_size_m));
  const int col = static_cast<int>(std::floor(east / g.cell_size_m));
  if (row < 0 || row >= g.rows || col < 0 || col >= g.cols) return std::nullopt;
  return CellId{row, col, -1};
}

struct RegionSet {
  GridSpec grid;
  std::vector<CellId> regions;  // region_index == position

  int index_of(int row, int col) const {
    auto it = lookup_.find({row, col});
    return it == lookup_.end() ? -1 : it->second;
  }

  int index_of(const GeoPoint& p) const {
    const auto cell = try_cell_of(p, grid);
    if (!cell) return -1;
    return index_of(cell->row, cell->col);
  }

  std::size_t size() const { return regions.size(); }

  static RegionSet build(const std::vector<EventRecord>& events, const GridSpec& g) {
    g.validate();
    RegionSet rs;
    rs.grid = g;
    std::map<std::pair<int, int>, int> seen;
    for (const auto& e : events) {
      const auto cell = try_cell_of(e.location, g);
      if (!cell) continue;  // events outside the configured grid are ignored
      seen.emplace(std::make_pair(cell->row, cell->col), 0);
    }
    int next = 0;
    for (auto& [rc, idx] : seen) {
      idx = next++;
      rs.regions.push_back(CellId{rc.first, rc.second, idx});
    }
    rs.lookup_ = std::move(seen);
    return rs;
  }

private:
  std::map<std::pair<int, int>, int> lookup_;
};

inline RegionSet build_region_set(const std::vector<EventRecord>& events, const GridSpec& g) {
  return RegionSet::build(events, g);
}

// ---------------------------------------------------------------------------
// Desc2Vec: average pre-trained vector of every in-vocabulary token across
// all descriptions in the region's history. Tokens are lowercased maximal
// alphanumeric runs.
// ---------------------------------------------------------------------------

inline constexpr int kDesc2VecDim = WordVectorTable::kDim;

template <typename Fn>
void for_each_token(std::string_view text, Fn&& fn) {
  std::string token;
  for (char c : text) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (alnum) {
      token.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!token.empty()) {
      fn(token);
      token.clear();
    }
  }
  if (!token.empty()) fn(token);
}

inline std::array<double, kDesc2VecDim> desc2vec(const std::vector<const EventRecord*>& history,
                                                 const WordVectorTable& wv) {
  std::array<double, kDesc2VecDim> sum{};
  std::size_t count = 0;
  for (const EventRecord* e : history) {
    for_each_token(e->description, [&](const std::string& token) {
      const double* v = wv.lookup(token);
      if (!v) return;
      for (int d = 0; d < kDesc2VecDim; ++d) sum[d] += v[d];
      ++count;
    });
  }
  if (count == 0) return sum;  // zero vector
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

// ---------------------------------------------------------------------------
// Region statics: POI counts inside the cell (type order) plus Desc2Vec.
// ---------------------------------------------------------------------------

inline constexpr int kStaticsDim = kPoiTypeCount + kDesc2VecDim;

struct RegionStatics {
  std::array<double, kPoiTypeCount> poi_counts{};
  std::array<double, kDesc2VecDim> desc_vector{};

  std::array<double, kStaticsDim> flatten() const {
    std::array<double, kStaticsDim> out{};
    int k = 0;
    for (double v : poi_counts) out[k++] = v;
    for (double v : desc_vector) out[k++] = v;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Single-interval feature assembly. Weather values come from the joined
// record; fields the record lacks stay NaN for the timeline builder to
// carry forward or the normalizer to impute.
// ---------------------------------------------------------------------------

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline IntervalVector interval_features(const std::vector<const EventRecord*>& region_events,
                                        UtcTime interval_start,
                                        const WeatherStations::Station* station,
                                        const GeoPoint& region_center, int utc_offset_minutes) {
  IntervalVector v;
  for (const EventRecord* e : region_events) {
    if (e->start_time >= interval_start && e->start_time < interval_start + kIntervalSeconds)
      v.traffic[static_cast<int>(e->etype)] += 1.0;
  }

  const int wd = weekday_of(interval_start, utc_offset_minutes);
  v.weekday = wd < 5 ? 1.0 : 0.0;
  const CivilTime local = civil_of(interval_start, utc_offset_minutes);
  v.hour_slot[hour_slot_of(local.hour)] = 1.0;
  v.daylight =
      period_of_day(region_center, interval_start, DaylightSystem::sunrise_sunset) == DayNight::day
          ? 1.0
          : 0.0;

  if (!station) {
    for (int i = 0; i < kWeatherContinuous; ++i) v.weather[i] = kMissing;
    return v;
  }
  const WeatherRecord& rec = WeatherStations::closest_in_time(*station, interval_start);
  auto opt = [](const std::optional<double>& o) { return o ? *o : kMissing; };
  v.weather[0] = opt(rec.temperature);
  v.weather[1] = opt(rec.pressure);
  v.weather[2] = opt(rec.humidity);
  v.weather[3] = opt(rec.visibility);
  v.weather[4] = opt(rec.wind_speed);
  v.weather[5] = opt(rec.precipitation);
  v.weather[6] = rec.rain ? 1.0 : 0.0;
  v.weather[7] = rec.snow ? 1.0 : 0.0;
  v.weather[8] = rec.fog ? 1.0 : 0.0;
  v.weather[9] = rec.hail ? 1.0 : 0.0;
  return v;
}

// Timeline for one region: interval vectors for [t0, t0 + n*15min), with
// missing continuous weather carried forward for up to max_gap_hours. The
// weather source is the station nearest to the region center.
inline std::vector<IntervalVector> build_region_timeline(
    const std::vector<const EventRecord*>& region_events, UtcTime t0, int n_intervals,
    const WeatherStations& stations, const GeoPoint& region_center, int utc_offset_minutes,
    double max_gap_hours = 6.0) {
  // Bucket events by interval index once.
  std::vector<std::vector<const EventRecord*>> buckets(n_intervals);
  for (const EventRecord* e : region_events) {
    if (e->start_time < t0) continue;
    const std::int64_t idx = (e->start_time - t0) / kIntervalSeconds;
    if (idx >= 0 && idx < n_intervals) buckets[static_cast<std::size_t>(idx)].push_back(e);
  }

  const WeatherStations::Station* station =
      stations.empty() ? nullptr : &stations.stations[stations.index.nearest(region_center).index];

  std::array<double, kWeatherContinuous> last_value{};
  std::array<UtcTime, kWeatherContinuous> last_time{};
  std::array<bool, kWeatherContinuous> has_last{};
  const double max_gap_s = max_gap_hours * 3600.0;

  std::vector<IntervalVector> timeline;
  timeline.reserve(n_intervals);
  for (int i = 0; i < n_intervals; ++i) {
    const UtcTime start = t0 + static_cast<UtcTime>(i) * kIntervalSeconds;
    IntervalVector v = interval_features(buckets[i], start, station, region_center,
                                         utc_offset_minutes);
    if (station) {
      const UtcTime rec_time = WeatherStations::closest_in_time(*station, start).time;
      for (int f = 0; f < kWeatherContinuous; ++f) {
        if (!std::isnan(v.weather[f])) {
          last_value[f] = v.weather[f];
          last_time[f] = rec_time;
          has_last[f] = true;
        } else if (has_last[f] && static_cast<double>(start - last_time[f]) <= max_gap_s) {
          v.weather[f] = last_value[f];
        }
      }
    }
    timeline.push_back(v);
  }
  return timeline;
}

}  // namespace dap
