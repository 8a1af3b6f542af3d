#pragma once

// File-based ingestion: validated parsers for event/weather/POI CSVs and the
// plain-text word-vector format, plus the matching writers.

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dap/csv.hpp"
#include "dap/records.hpp"

namespace dap {

enum class EventFormat { csv, jsonl };

namespace parsedetail {

[[noreturn]] inline void row_error(std::size_t line, const std::string& reason) {
  fail(Errc::row_error, "line " + std::to_string(line) + ": " + reason);
}

[[noreturn]] inline void schema_error(std::size_t line, const std::string& reason) {
  fail(Errc::schema_error, "line " + std::to_string(line) + ": " + reason);
}

struct Header {
  std::map<std::string, std::size_t> cols;

  std::size_t require(const std::string& name) const {
    auto it = cols.find(name);
    if (it == cols.end()) fail(Errc::schema_error, "missing required column '" + name + "'");
    return it->second;
  }
  std::optional<std::size_t> optional(const std::string& name) const {
    auto it = cols.find(name);
    if (it == cols.end()) return std::nullopt;
    return it->second;
  }
};

inline Header read_header(CsvReader& reader, const std::vector<std::string>& known) {
  CsvRow row;
  if (!reader.next(row)) fail(Errc::schema_error, "empty file: missing header");
  Header h;
  for (std::size_t i = 0; i < row.fields.size(); ++i) {
    const std::string& name = row.fields[i];
    bool ok = false;
    for (const auto& k : known) ok = ok || k == name;
    if (!ok) fail(Errc::schema_error, "unknown column '" + name + "'");
    if (!h.cols.emplace(name, i).second)
      fail(Errc::schema_error, "duplicate column '" + name + "'");
  }
  return h;
}

inline std::string get(const CsvRow& row, std::size_t col) {
  if (col >= row.fields.size()) row_error(row.line, "missing field " + std::to_string(col + 1));
  return row.fields[col];
}

inline double parse_real(const CsvRow& row, std::size_t col, const char* what) {
  const std::string s = get(row, col);
  double v = 0;
  if (!try_parse_double(s, v))
    row_error(row.line, std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

inline std::optional<double> parse_opt_real(const CsvRow& row, std::size_t col, const char* what) {
  const std::string s = get(row, col);
  if (s.empty()) return std::nullopt;  // blank cell = missing, not zero
  double v = 0;
  if (!try_parse_double(s, v))
    row_error(row.line, std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

inline bool parse_flag(const CsvRow& row, std::size_t col, const char* what) {
  const std::string s = get(row, col);
  if (s.empty() || s == "0" || s == "false") return false;
  if (s == "1" || s == "true") return true;
  row_error(row.line, std::string("invalid ") + what + ": '" + s + "'");
}

inline UtcTime parse_stamp(const CsvRow& row, std::size_t col, const char* what) {
  const std::string s = get(row, col);
  try {
    return parse_time(s);
  } catch (const Error&) {
    row_error(row.line, std::string("invalid ") + what + ": '" + s + "'");
  }
}

}  // namespace parsedetail

// ---------------------------------------------------------------------------
// Events. CSV columns: id,source,type,lat,lng,start_time,end_time,severity,
// tmc,description; optional address columns street,city,county,state,zipcode.
// JSONL support intentionally covers the same fields one object per line.
// ---------------------------------------------------------------------------

inline std::vector<EventRecord> parse_events_csv(std::istream& in) {
  using namespace parsedetail;
  CsvReader reader(in);
  const std::vector<std::string> known = {"id",       "source",  "type",   "lat",
                                          "lng",      "start_time", "end_time", "severity",
                                          "tmc",      "description", "street", "city",
                                          "county",   "state",   "zipcode"};
  const Header h = read_header(reader, known);
  const std::size_t c_id = h.require("id"), c_src = h.require("source"), c_type = h.require("type");
  const std::size_t c_lat = h.require("lat"), c_lng = h.require("lng");
  const std::size_t c_start = h.require("start_time"), c_end = h.require("end_time");
  const std::size_t c_sev = h.require("severity"), c_tmc = h.require("tmc");
  const std::size_t c_desc = h.require("description");
  const auto c_street = h.optional("street"), c_city = h.optional("city"),
             c_county = h.optional("county"), c_state = h.optional("state"),
             c_zip = h.optional("zipcode");

  std::vector<EventRecord> out;
  CsvRow row;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // trailing blank line
    EventRecord e;
    e.id = get(row, c_id);
    if (e.id.empty()) row_error(row.line, "empty id");
    if (!parse_source(get(row, c_src), e.source))
      row_error(row.line, "unknown source '" + get(row, c_src) + "'");
    if (!parse_event_type(get(row, c_type), e.etype))
      schema_error(row.line, "unknown event type '" + get(row, c_type) + "'");
    e.location.lat = parse_real(row, c_lat, "lat");
    e.location.lng = parse_real(row, c_lng, "lng");
    if (!e.location.valid()) row_error(row.line, "coordinates out of range");
    e.start_time = parse_stamp(row, c_start, "start_time");
    e.end_time = parse_stamp(row, c_end, "end_time");
    if (e.start_time > e.end_time) row_error(row.line, "start_time after end_time");
    const std::string sev = get(row, c_sev);
    if (!sev.empty()) {
      std::int64_t v = 0;
      if (!try_parse_int(sev, v)) row_error(row.line, "invalid severity '" + sev + "'");
      e.severity = static_cast<int>(v);
    }
    const std::string tmc = get(row, c_tmc);
    if (!tmc.empty()) e.tmc = tmc;
    e.description = get(row, c_desc);
    auto opt_str = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
      if (!col) return std::nullopt;
      std::string s = get(row, *col);
      if (s.empty()) return std::nullopt;
      return s;
    };
    e.street = opt_str(c_street);
    e.city = opt_str(c_city);
    e.county = opt_str(c_county);
    e.state = opt_str(c_state);
    e.zipcode = opt_str(c_zip);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<EventRecord> parse_events(const std::string& path,
                                             EventFormat format = EventFormat::csv);

inline void write_events(std::ostream& out, const std::vector<EventRecord>& events) {
  bool any_address = false;
  for (const auto& e : events)
    any_address = any_address || e.street || e.city || e.county || e.state || e.zipcode;
  std::vector<std::string> header = {"id",  "source",     "type",     "lat",      "lng",
                                     "start_time", "end_time", "severity", "tmc", "description"};
  if (any_address)
    for (const char* c : {"street", "city", "county", "state", "zipcode"}) header.push_back(c);
  csv_write_row(out, header);
  for (const auto& e : events) {
    std::vector<std::string> f = {e.id,
                                  std::string(to_string(e.source)),
                                  std::string(to_string(e.etype)),
                                  format_double(e.location.lat),
                                  format_double(e.location.lng),
                                  format_time(e.start_time),
                                  format_time(e.end_time),
                                  e.severity ? std::to_string(*e.severity) : "",
                                  e.tmc.value_or(""),
                                  e.description};
    if (any_address) {
      f.push_back(e.street.value_or(""));
      f.push_back(e.city.value_or(""));
      f.push_back(e.county.value_or(""));
      f.push_back(e.state.value_or(""));
      f.push_back(e.zipcode.value_or(""));
    }
    csv_write_row(out, f);
  }
}

// ---------------------------------------------------------------------------
// Weather
// ---------------------------------------------------------------------------

inline std::vector<WeatherRecord> parse_weather(std::istream& in) {
  using namespace parsedetail;
  CsvReader reader(in);
  const std::vector<std::string> known = {"station_id", "lat",        "lng",       "time",
                                          "temperature", "humidity",  "pressure",  "visibility",
                                          "wind_speed", "precipitation", "rain",   "snow",
                                          "fog",        "hail"};
  const Header h = read_header(reader, known);
  const std::size_t c_sid = h.require("station_id"), c_lat = h.require("lat"),
                    c_lng = h.require("lng"), c_time = h.require("time");
  const std::size_t c_temp = h.require("temperature"), c_hum = h.require("humidity"),
                    c_pres = h.require("pressure"), c_vis = h.require("visibility"),
                    c_wind = h.require("wind_speed"), c_prec = h.require("precipitation");
  const std::size_t c_rain = h.require("rain"), c_snow = h.require("snow"),
                    c_fog = h.require("fog"), c_hail = h.require("hail");

  std::vector<WeatherRecord> out;
  CsvRow row;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    WeatherRecord w;
    w.station_id = get(row, c_sid);
    if (w.station_id.empty()) row_error(row.line, "empty station_id");
    w.location.lat = parse_real(row, c_lat, "lat");
    w.location.lng = parse_real(row, c_lng, "lng");
    if (!w.location.valid()) row_error(row.line, "coordinates out of range");
    w.time = parse_stamp(row, c_time, "time");
    w.temperature = parse_opt_real(row, c_temp, "temperature");
    w.humidity = parse_opt_real(row, c_hum, "humidity");
    if (w.humidity && (*w.humidity < 0.0 || *w.humidity > 100.0))
      row_error(row.line, "humidity out of [0,100]");
    w.pressure = parse_opt_real(row, c_pres, "pressure");
    w.visibility = parse_opt_real(row, c_vis, "visibility");
    w.wind_speed = parse_opt_real(row, c_wind, "wind_speed");
    w.precipitation = parse_opt_real(row, c_prec, "precipitation");
    if (w.precipitation && *w.precipitation < 0.0) row_error(row.line, "negative precipitation");
    w.rain = parse_flag(row, c_rain, "rain");
    w.snow = parse_flag(row, c_snow, "snow");
    w.fog = parse_flag(row, c_fog, "fog");
    w.hail = parse_flag(row, c_hail, "hail");
    out.push_back(std::move(w));
  }
  return out;
}

inline void write_weather(std::ostream& out, const std::vector<WeatherRecord>& records) {
  csv_write_row(out, {"station_id", "lat", "lng", "time", "temperature", "humidity", "pressure",
                      "visibility", "wind_speed", "precipitation", "rain", "snow", "fog", "hail"});
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& w : records) {
    csv_write_row(out, {w.station_id, format_double(w.location.lat), format_double(w.location.lng),
                        format_time(w.time), opt(w.temperature), opt(w.humidity), opt(w.pressure),
                        opt(w.visibility), opt(w.wind_speed), opt(w.precipitation),
                        w.rain ? "1" : "0", w.snow ? "1" : "0", w.fog ? "1" : "0",
                        w.hail ? "1" : "0"});
  }
}

// ---------------------------------------------------------------------------
// POI
// ---------------------------------------------------------------------------

inline std::vector<PoiRecord> parse_poi(std::istream& in) {
  using namespace parsedetail;
  CsvReader reader(in);
  const Header h = read_header(reader, {"lat", "lng", "type"});
  const std::size_t c_lat = h.require("lat"), c_lng = h.require("lng"), c_type = h.require("type");
  std::vector<PoiRecord> out;
  CsvRow row;
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    PoiRecord p;
    p.location.lat = parse_real(row, c_lat, "lat");
    p.location.lng = parse_real(row, c_lng, "lng");
    if (!p.location.valid()) row_error(row.line, "coordinates out of range");
    if (!parse_poi_type(get(row, c_type), p.ptype))
      schema_error(row.line, "unknown POI type '" + get(row, c_type) + "'");
    out.push_back(p);
  }
  return out;
}

inline void write_poi(std::ostream& out, const std::vector<PoiRecord>& pois) {
  csv_write_row(out, {"lat", "lng", "type"});
  for (const auto& p : pois)
    csv_write_row(out, {format_double(p.location.lat), format_double(p.location.lng),
                        std::string(to_string(p.ptype))});
}

// ---------------------------------------------------------------------------
// Word vectors: one token plus 100 whitespace-separated reals per line.
// ---------------------------------------------------------------------------

struct WordVectorLoad {
  WordVectorTable table;
  std::size_t duplicate_tokens = 0;  // overwritten entries (last occurrence wins)
};

inline WordVectorLoad parse_word_vectors(std::istream& in) {
  WordVectorLoad load;
  std::string line;
  std::size_t line_no = 0;
  double vec[WordVectorTable::kDim];
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip_ws = [&]() {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    };
    skip_ws();
    const char* tok_begin = p;
    while (p < end && *p != ' ' && *p != '\t' && *p != '\r') ++p;
    const std::string_view token(tok_begin, static_cast<std::size_t>(p - tok_begin));
    if (token.empty()) continue;
    int count = 0;
    for (;;) {
      skip_ws();
      if (p >= end) break;
      double v = 0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc())
        fail(Errc::dimension_error,
             "line " + std::to_string(line_no) + ": invalid value in vector");
      p = res.ptr;
      if (count < WordVectorTable::kDim) vec[count] = v;
      ++count;
    }
    if (count != WordVectorTable::kDim)
      fail(Errc::dimension_error, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(WordVectorTable::kDim) + " values, got " +
                                      std::to_string(count));
    if (!load.table.insert(token, vec)) ++load.duplicate_tokens;
  }
  return load;
}

inline WordVectorLoad parse_word_vectors(const std::string& path) {
  auto f = open_input(path);
  return parse_word_vectors(f);
}

// One JSON object per line; same fields and validation as the CSV schema.
inline std::vector<EventRecord> parse_events_jsonl(std::istream& in) {
  using namespace parsedetail;
  std::vector<EventRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) row_error(line_no, "invalid JSON object");
    EventRecord e;
    auto str = [&](const char* key, bool required) -> std::string {
      if (!j.contains(key)) {
        if (required) row_error(line_no, std::string("missing field '") + key + "'");
        return {};
      }
      if (!j[key].is_string()) row_error(line_no, std::string("field '") + key + "' not a string");
      return j[key].get<std::string>();
    };
    e.id = str("id", true);
    if (e.id.empty()) row_error(line_no, "empty id");
    if (!parse_source(str("source", true), e.source)) row_error(line_no, "unknown source");
    if (!parse_event_type(str("type", true), e.etype))
      schema_error(line_no, "unknown event type '" + str("type", true) + "'");
    if (!j.contains("lat") || !j.contains("lng") || !j["lat"].is_number() || !j["lng"].is_number())
      row_error(line_no, "missing or invalid coordinates");
    e.location = GeoPoint{j["lat"].get<double>(), j["lng"].get<double>()};
    if (!e.location.valid()) row_error(line_no, "coordinates out of range");
    try {
      e.start_time = parse_time(str("start_time", true));
      e.end_time = parse_time(str("end_time", true));
    } catch (const Error&) {
      row_error(line_no, "invalid timestamp");
    }
    if (e.start_time > e.end_time) row_error(line_no, "start_time after end_time");
    if (j.contains("severity") && !j["severity"].is_null()) {
      if (!j["severity"].is_number_integer()) row_error(line_no, "invalid severity");
      e.severity = j["severity"].get<int>();
    }
    if (j.contains("tmc") && !j["tmc"].is_null()) e.tmc = str("tmc", false);
    if (!j.contains("description") || !j["description"].is_string())
      row_error(line_no, "missing description");
    e.description = j["description"].get<std::string>();
    for (auto [key, field] : {std::pair<const char*, std::optional<std::string>*>{"street", &e.street},
                              {"city", &e.city},
                              {"county", &e.county},
                              {"state", &e.state},
                              {"zipcode", &e.zipcode}}) {
      if (j.contains(key) && j[key].is_string() && !j[key].get<std::string>().empty())
        *field = j[key].get<std::string>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<EventRecord> parse_events(const std::string& path, EventFormat format) {
  auto f = open_input(path);
  if (format == EventFormat::csv) return parse_events_csv(f);
  return parse_events_jsonl(f);
}

inline std::vector<WeatherRecord> parse_weather(const std::string& path) {
  auto f = open_input(path);
  return parse_weather(f);
}

inline std::vector<PoiRecord> parse_poi(const std::string& path) {
  auto f = open_input(path);
  return parse_poi(f);
}

}  // namespace dap
