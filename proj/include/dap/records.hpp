#pragma once

// Domain records: traffic events, weather observations, points-of-interest,
// and the pre-trained word-vector table.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dap/common.hpp"
#include "dap/geo.hpp"

namespace dap {

// ---------------------------------------------------------------------------
// Enumerations. Order is load-bearing: traffic counts and POI counts are laid
// out in feature vectors in exactly this order.
// ---------------------------------------------------------------------------

enum class Source : int { mapquest_like = 0, bing_like = 1, synthetic = 2 };

enum class EventType : int {
  accident = 0,
  broken_vehicle,
  congestion,
  construction,
  event,
  lane_blocked,
  flow_incident
};
inline constexpr int kEventTypeCount = 7;

enum class PoiType : int {
  amenity = 0,
  bump,
  crossing,
  give_way,
  junction,
  no_exit,
  railway,
  roundabout,
  station,
  stop,
  traffic_calming,
  traffic_signal,
  turning_loop
};
inline constexpr int kPoiTypeCount = 13;

inline constexpr std::array<std::string_view, 7> kEventTypeNames = {
    "accident", "broken-vehicle", "congestion", "construction",
    "event",    "lane-blocked",   "flow-incident"};

inline constexpr std::array<std::string_view, 13> kPoiTypeNames = {
    "amenity", "bump",         "crossing",        "give-way",     "junction",
    "no-exit", "railway",      "roundabout",      "station",      "stop",
    "traffic-calming", "traffic-signal", "turning-loop"};

inline constexpr std::array<std::string_view, 3> kSourceNames = {"mapquest", "bing", "synthetic"};

inline std::string_view to_string(EventType t) { return kEventTypeNames[static_cast<int>(t)]; }
inline std::string_view to_string(PoiType t) { return kPoiTypeNames[static_cast<int>(t)]; }
inline std::string_view to_string(Source s) { return kSourceNames[static_cast<int>(s)]; }

inline bool parse_event_type(std::string_view s, EventType& out) {
  for (int i = 0; i < kEventTypeCount; ++i) {
    if (s == kEventTypeNames[i]) {
      out = static_cast<EventType>(i);
      return true;
    }
  }
  return false;
}

inline bool parse_poi_type(std::string_view s, PoiType& out) {
  for (int i = 0; i < kPoiTypeCount; ++i) {
    if (s == kPoiTypeNames[i]) {
      out = static_cast<PoiType>(i);
      return true;
    }
  }
  return false;
}

inline bool parse_source(std::string_view s, Source& out) {
  for (int i = 0; i < 3; ++i) {
    if (s == kSourceNames[i]) {
      out = static_cast<Source>(i);
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct EventRecord {
  std::string id;
  Source source = Source::synthetic;
  EventType etype = EventType::accident;
  GeoPoint location;
  UtcTime start_time = 0;
  UtcTime end_time = 0;
  std::string description;  // may be empty, never absent
  std::optional<int> severity;
  std::optional<std::string> tmc;
  // Optional address columns, accepted on input and passed through.
  std::optional<std::string> street, city, county, state, zipcode;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct WeatherRecord {
  std::string station_id;
  GeoPoint location;
  UtcTime time = 0;
  std::optional<double> temperature;   // deg C
  std::optional<double> humidity;      // percent [0, 100]
  std::optional<double> pressure;      // hPa
  std::optional<double> visibility;    // km
  std::optional<double> wind_speed;    // km/h
  std::optional<double> precipitation; // mm, >= 0
  bool rain = false, snow = false, fog = false, hail = false;

  friend bool operator==(const WeatherRecord&, const WeatherRecord&) = default;
};

struct PoiRecord {
  GeoPoint location;
  PoiType ptype = PoiType::amenity;

  friend bool operator==(const PoiRecord&, const PoiRecord&) = default;
};

// ---------------------------------------------------------------------------
// Word vectors: token -> 100-dim vector, case-insensitive after lowercasing.
// ---------------------------------------------------------------------------

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

class WordVectorTable {
public:
  static constexpr int kDim = 100;

  // Inserts or overwrites (last wins); token is lowercased.
  // Returns false when the token already existed.
  bool insert(std::string_view token, const double* values) {
    const std::string key = to_lower(token);
    auto it = index_.find(key);
    if (it != index_.end()) {
      std::copy(values, values + kDim, values_.begin() + it->second * kDim);
      return false;
    }
    const std::size_t slot = index_.size();
    index_.emplace(key, slot);
    values_.insert(values_.end(), values, values + kDim);
    return true;
  }

  const double* lookup(std::string_view token) const {
    auto it = index_.find(to_lower(token));
    if (it == index_.end()) return nullptr;
    return values_.data() + it->second * kDim;
  }

  std::size_t size() const { return index_.size(); }

private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> values_;
};

}  // namespace dap
