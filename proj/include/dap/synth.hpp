#pragma once

// Synthetic-city generator. Produces event/weather/POI/word-vector files
// plus a ground-truth manifest, driven by a fully specified accident rule so
// tests can compute the ideal predictor's performance from first principles.
//
// Rule: an accident occurs in interval t+1 of region r iff
//   congestion_count(r, t) >= congestion_threshold
//   AND (if require_junction) r contains a junction POI
//   AND (if require_rush_hour) interval t starts in the [6,10) or [15,19)
//       local slot,
// flipped with probability `noise`. Weather is generated independently of
// the rule and the clock, so it carries no label signal.

#include <string>
#include <vector>

#include <json.hpp>

#include "dap/features.hpp"
#include "dap/parse.hpp"

namespace dap {

struct SynthRule {
  int congestion_threshold = 2;
  bool require_junction = true;
  bool require_rush_hour = false;
  double noise = 0.05;

  friend bool operator==(const SynthRule&, const SynthRule&) = default;

  nlohmann::json to_json() const {
    return nlohmann::json{{"congestion_threshold", congestion_threshold},
                          {"require_junction", require_junction},
                          {"require_rush_hour", require_rush_hour},
                          {"noise", noise}};
  }
};

struct SynthScenario {
  std::string city = "synthville";
  GeoPoint anchor{39.9, -83.1};
  int rows = 4;
  int cols = 4;
  double cell_size_m = 5000.0;
  UtcTime start_time = 1528070400;  // 2018-06-04T00:00:00Z, a Monday
  int weeks = 4;
  int utc_offset_minutes = 0;
  double junction_region_fraction = 0.5;
  double congestion_burst_prob = 0.35;  // chance of a 2..4 congestion burst per interval
  double side_event_prob = 0.02;        // other event types, pure decoration
  int n_stations = 3;
  int weather_report_minutes = 45;
  double weather_missing_prob = 0.05;
  int planted_duplicates = 25;  // jittered accident copies for dedup exercises
  SynthRule rule;
  std::uint64_t seed = 1;

  friend bool operator==(const SynthScenario&, const SynthScenario&) = default;
};

struct SynthOutput {
  std::vector<EventRecord> events;
  std::vector<WeatherRecord> weather;
  std::vector<PoiRecord> pois;
  std::string word_vectors_text;
  nlohmann::json truth;
};

namespace synthdetail {

inline GeoPoint jitter_in_cell(const GeoPoint& center, double spread_m, RngStream& rng) {
  const double north = rng.next_uniform(-spread_m, spread_m);
  const double east = rng.next_uniform(-spread_m, spread_m);
  GeoPoint p;
  p.lat = center.lat + north / kMetersPerDegLat;
  p.lng = center.lng + east / (kMetersPerDegLat * std::cos(center.lat * kDegToRad));
  return p;
}

inline bool is_rush_slot(UtcTime interval_start, int utc_offset_minutes) {
  const int h = civil_of(interval_start, utc_offset_minutes).hour;
  return (h >= 6 && h < 10) || (h >= 15 && h < 19);
}

}  // namespace synthdetail

inline SynthOutput generate_city(const SynthScenario& s) {
  using synthdetail::jitter_in_cell;
  RngStream master(s.seed);
  RngStream region_rng = master.fork(1);
  RngStream traffic_rng = master.fork(2);
  RngStream weather_rng = master.fork(3);
  RngStream desc_rng = master.fork(4);
  RngStream dup_rng = master.fork(5);
  RngStream vec_rng = master.fork(6);

  GridSpec grid;
  grid.anchor = s.anchor;
  grid.cell_size_m = s.cell_size_m;
  grid.rows = s.rows;
  grid.cols = s.cols;
  grid.validate();

  SynthOutput out;
  const int n_regions = s.rows * s.cols;
  const int intervals = s.weeks * 7 * 24 * 4;

  // Region roles and POI geometry.
  std::vector<bool> junction_region(n_regions);
  nlohmann::json regions_json = nlohmann::json::array();
  std::vector<GeoPoint> centers(n_regions);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const int idx = r * s.cols + c;
      centers[idx] = grid.cell_center(r, c);
      junction_region[idx] = region_rng.next_double() < s.junction_region_fraction;
      if (junction_region[idx])
        out.pois.push_back({jitter_in_cell(centers[idx], 40.0, region_rng), PoiType::junction});
      // decorative POIs so every statics vector has some mass
      out.pois.push_back(
          {jitter_in_cell(centers[idx], 400.0, region_rng), PoiType::traffic_signal});
      if (region_rng.next_double() < 0.5)
        out.pois.push_back({jitter_in_cell(centers[idx], 400.0, region_rng), PoiType::stop});
      regions_json.push_back(nlohmann::json{{"row", r},
                                            {"col", c},
                                            {"junction", static_cast<bool>(junction_region[idx])},
                                            {"center_lat", centers[idx].lat},
                                            {"center_lng", centers[idx].lng}});
    }
  }

  // Road-name pools for descriptions; tokens feed the word-vector file.
  const std::vector<std::string> roads = {"Main St", "Oak Ave",  "River Rd", "I-70",
                                          "I-270",   "US-33",    "High St",  "Broad St"};
  const std::vector<std::string> crossings = {"5th Ave", "Maple Dr", "Mill Ln", "2nd St"};

  int event_counter = 0;
  auto next_id = [&](const char* prefix) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%06d", prefix, event_counter++);
    return std::string(buf);
  };

  auto make_event = [&](EventType etype, int region, UtcTime t, const std::string& desc) {
    EventRecord e;
    e.id = next_id("E");
    e.source = Source::mapquest_like;
    e.etype = etype;
    e.location = jitter_in_cell(centers[region], s.cell_size_m / 3.0, traffic_rng);
    e.start_time = t;
    e.end_time = t + 300 + static_cast<UtcTime>(traffic_rng.next_below(1800));
    e.description = desc;
    return e;
  };

  // Traffic process and the planted rule.
  std::vector<std::vector<int>> congestion_count(
      n_regions, std::vector<int>(intervals, 0));
  std::size_t accidents_emitted = 0;
  for (int region = 0; region < n_regions; ++region) {
    for (int t = 0; t < intervals; ++t) {
      const UtcTime t_start = s.start_time + static_cast<UtcTime>(t) * kIntervalSeconds;
      int count = 0;
      if (traffic_rng.next_double() < s.congestion_burst_prob)
        count = 2 + static_cast<int>(traffic_rng.next_below(3));
      else
        count = static_cast<int>(traffic_rng.next_below(2));
      congestion_count[region][t] = count;
      for (int k = 0; k < count; ++k) {
        const UtcTime at = t_start + static_cast<UtcTime>(traffic_rng.next_below(kIntervalSeconds));
        const std::string& road = roads[desc_rng.next_below(roads.size())];
        out.events.push_back(make_event(EventType::congestion, region, at,
                                        "Congestion on " + road + " slow traffic"));
      }
      if (traffic_rng.next_double() < s.side_event_prob) {
        const UtcTime at = t_start + static_cast<UtcTime>(traffic_rng.next_below(kIntervalSeconds));
        const EventType side = traffic_rng.next_below(2) ? EventType::broken_vehicle
                                                         : EventType::construction;
        out.events.push_back(
            make_event(side, region, at, "Vehicle reported near " +
                                             roads[desc_rng.next_below(roads.size())]));
      }
      // rule decides the accident in interval t+1
      if (t + 1 >= intervals) continue;
      bool fired = congestion_count[region][t] >= s.rule.congestion_threshold;
      if (s.rule.require_junction && !junction_region[region]) fired = false;
      if (s.rule.require_rush_hour &&
          !synthdetail::is_rush_slot(t_start, s.utc_offset_minutes))
        fired = false;
      const bool flip = traffic_rng.next_double() < s.rule.noise;
      if (fired != flip) {
        const UtcTime at = t_start + kIntervalSeconds +
                           static_cast<UtcTime>(traffic_rng.next_below(kIntervalSeconds));
        std::string desc;
        if (junction_region[region]) {
          desc = "Accident on " + roads[desc_rng.next_below(roads.size())] + " at Exit " +
                 std::to_string(desc_rng.next_below(40));
        } else {
          desc = "Accident on " + roads[desc_rng.next_below(roads.size())] + " at " +
                 crossings[desc_rng.next_below(crossings.size())];
        }
        out.events.push_back(make_event(EventType::accident, region, at, desc));
        ++accidents_emitted;
      }
    }
  }

  // Planted duplicates: jittered copies of existing accidents from the other
  // source, within the duplicate-linkage thresholds.
  nlohmann::json duplicates_json = nlohmann::json::array();
  std::vector<std::size_t> accident_positions;
  for (std::size_t i = 0; i < out.events.size(); ++i)
    if (out.events[i].etype == EventType::accident) accident_positions.push_back(i);
  const int n_dups = std::min<std::size_t>(s.planted_duplicates, accident_positions.size());
  for (int d = 0; d < n_dups; ++d) {
    const auto& base =
        out.events[accident_positions[dup_rng.next_below(accident_positions.size())]];
    EventRecord copy = base;
    copy.id = base.id + "D";
    copy.source = Source::bing_like;
    copy.location = jitter_in_cell(base.location, 100.0, dup_rng);
    copy.start_time = base.start_time + 60 + static_cast<UtcTime>(dup_rng.next_below(420));
    copy.end_time = std::max(copy.end_time, copy.start_time + 300);
    copy.description = "At " + std::to_string(dup_rng.next_below(30)) + "th St/Exit " +
                       std::to_string(dup_rng.next_below(30)) + " - Accident";
    out.events.push_back(copy);
    duplicates_json.push_back(nlohmann::json{{"survivor", base.id}, {"copy", copy.id}});
  }

  // Weather stations: independent slow random walks, no clock signal.
  for (int st = 0; st < s.n_stations; ++st) {
    const GeoPoint pos = jitter_in_cell(
        grid.cell_center(s.rows / 2, s.cols / 2),
        s.cell_size_m * std::max(s.rows, s.cols) / 2.0, weather_rng);
    double temperature = weather_rng.next_uniform(10, 28);
    double pressure = weather_rng.next_uniform(1000, 1025);
    double humidity = weather_rng.next_uniform(35, 75);
    UtcTime t = s.start_time;
    const UtcTime horizon = s.start_time + static_cast<UtcTime>(intervals) * kIntervalSeconds;
    while (t < horizon) {
      WeatherRecord w;
      w.station_id = "S" + std::to_string(st);
      w.location = pos;
      w.time = t;
      temperature += weather_rng.next_uniform(-0.6, 0.6);
      pressure += weather_rng.next_uniform(-0.4, 0.4);
      humidity = std::clamp(humidity + weather_rng.next_uniform(-1.5, 1.5), 5.0, 100.0);
      if (weather_rng.next_double() >= s.weather_missing_prob) w.temperature = temperature;
      if (weather_rng.next_double() >= s.weather_missing_prob) w.pressure = pressure;
      if (weather_rng.next_double() >= s.weather_missing_prob) w.humidity = humidity;
      w.visibility = 10.0;
      w.wind_speed = std::abs(weather_rng.next_uniform(0, 25));
      const bool raining = weather_rng.next_double() < 0.08;
      w.rain = raining;
      w.precipitation = raining ? weather_rng.next_uniform(0.1, 4.0) : 0.0;
      out.weather.push_back(w);
      t += static_cast<UtcTime>((s.weather_report_minutes + weather_rng.next_below(20)) * 60);
    }
  }

  // Word vectors over the description vocabulary.
  {
    std::vector<std::string> vocab;
    auto add_tokens = [&](const std::string& text) {
      for_each_token(text, [&](const std::string& tok) {
        for (const auto& v : vocab)
          if (v == tok) return;
        vocab.push_back(tok);
      });
    };
    for (const auto& r : roads) add_tokens(r);
    for (const auto& c : crossings) add_tokens(c);
    add_tokens("accident on at exit congestion slow traffic vehicle reported near st");
    for (int i = 0; i < 60; ++i) add_tokens("filler" + std::to_string(i));
    std::string text;
    for (const auto& tok : vocab) {
      text += tok;
      for (int d = 0; d < WordVectorTable::kDim; ++d) {
        text += ' ';
        text += format_double(vec_rng.next_uniform(-0.5, 0.5));
      }
      text += '\n';
    }
    out.word_vectors_text = std::move(text);
  }

  // Ground-truth manifest.
  out.truth = nlohmann::json{
      {"city", s.city},
      {"seed", s.seed},
      {"grid", {{"anchor_lat", s.anchor.lat},
                {"anchor_lng", s.anchor.lng},
                {"rows", s.rows},
                {"cols", s.cols},
                {"cell_size_m", s.cell_size_m}}},
      {"start_time", format_time(s.start_time)},
      {"weeks", s.weeks},
      {"intervals", intervals},
      {"utc_offset_minutes", s.utc_offset_minutes},
      {"regions", regions_json},
      {"rule", s.rule.to_json()},
      {"expected_entries_per_region", intervals - 8},
      {"accidents_emitted", accidents_emitted},
      {"events_total", out.events.size()},
      {"planted_duplicates", duplicates_json}};
  return out;
}

inline void write_city(const SynthOutput& city, const std::string& dir) {
  {
    auto f = open_output(dir + "/events.csv");
    write_events(f, city.events);
  }
  {
    auto f = open_output(dir + "/weather.csv");
    write_weather(f, city.weather);
  }
  {
    auto f = open_output(dir + "/poi.csv");
    write_poi(f, city.pois);
  }
  {
    auto f = open_output(dir + "/wordvec.txt");
    f << city.word_vectors_text;
  }
  {
    auto f = open_output(dir + "/truth.json");
    f << city.truth.dump(2) << '\n';
  }
}

}  // namespace dap
