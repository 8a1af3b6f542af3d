#pragma once

// Shared plumbing: error category, UTC time handling, deterministic RNG,
// locale-free number formatting, content hashing.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace dap {

enum class Errc {
  config,
  out_of_grid,
  empty_index,
  invalid_radius,
  row_error,
  schema_error,
  dimension_error,
  empty_input,
  too_short,
  span_error,
  shape_error,
  batch_too_small,
  divergence,
  unknown_region,
  invalid_penalty,
  empty_eval,
  empty_feature_set,
  stage_order,
  io
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

  // Process exit code: 2 config error, 4 numeric divergence, 3 any data error.
  int exit_code() const noexcept {
    switch (code_) {
      case Errc::config: return 2;
      case Errc::divergence: return 4;
      default: return 3;
    }
  }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

// ---------------------------------------------------------------------------
// UTC time. Seconds since 1970-01-01T00:00:00Z, leap seconds ignored.
// ---------------------------------------------------------------------------

using UtcTime = std::int64_t;

struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

namespace timedetail {

// Howard Hinnant's proleptic Gregorian algorithms.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace timedetail

inline UtcTime to_utc(const CivilTime& c) {
  const std::int64_t days = timedetail::days_from_civil(c.year, static_cast<unsigned>(c.month),
                                                        static_cast<unsigned>(c.day));
  return days * 86400 + c.hour * 3600 + c.minute * 60 + c.second;
}

inline CivilTime civil_of(UtcTime t, int utc_offset_minutes = 0) {
  t += static_cast<std::int64_t>(utc_offset_minutes) * 60;
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  CivilTime c;
  unsigned m = 0, d = 0;
  timedetail::civil_from_days(days, c.year, m, d);
  c.month = static_cast<int>(m);
  c.day = static_cast<int>(d);
  c.hour = static_cast<int>(rem / 3600);
  c.minute = static_cast<int>((rem % 3600) / 60);
  c.second = static_cast<int>(rem % 60);
  return c;
}

// 0 = Monday .. 6 = Sunday, in the shifted local frame.
inline int weekday_of(UtcTime t, int utc_offset_minutes = 0) {
  std::int64_t days = (t + static_cast<std::int64_t>(utc_offset_minutes) * 60) / 86400;
  if ((t + static_cast<std::int64_t>(utc_offset_minutes) * 60) % 86400 < 0) days -= 1;
  // 1970-01-01 was a Thursday.
  std::int64_t wd = (days + 3) % 7;
  if (wd < 0) wd += 7;
  return static_cast<int>(wd);
}

// Parses ISO-8601 with an explicit UTC offset ("Z", "+HH:MM", "-HH:MM", "+HHMM").
// Fractional seconds are accepted and truncated.
inline UtcTime parse_time(std::string_view s) {
  auto bad = [&]() -> UtcTime {
    fail(Errc::row_error, "invalid ISO-8601 timestamp: '" + std::string(s) + "'");
  };
  auto digits = [&](std::size_t pos, std::size_t n, int& out) -> bool {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char c = s[pos + i];
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    out = v;
    return true;
  };
  CivilTime c;
  if (!digits(0, 4, c.year) || s.size() < 19) return bad();
  if (s[4] != '-' || !digits(5, 2, c.month)) return bad();
  if (s[7] != '-' || !digits(8, 2, c.day)) return bad();
  if ((s[10] != 'T' && s[10] != ' ') || !digits(11, 2, c.hour)) return bad();
  if (s[13] != ':' || !digits(14, 2, c.minute)) return bad();
  if (s[16] != ':' || !digits(17, 2, c.second)) return bad();
  if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 || c.minute > 59 ||
      c.second > 60)
    return bad();
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  if (pos >= s.size()) return bad();  // offset is required
  int offset_min = 0;
  if (s[pos] == 'Z') {
    if (pos + 1 != s.size()) return bad();
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    ++pos;
    int oh = 0, om = 0;
    if (!digits(pos, 2, oh)) return bad();
    pos += 2;
    if (pos < s.size() && s[pos] == ':') ++pos;
    if (pos != s.size()) {
      if (!digits(pos, 2, om)) return bad();
      pos += 2;
      if (pos != s.size()) return bad();
    }
    offset_min = sign * (oh * 60 + om);
  } else {
    return bad();
  }
  return to_utc(c) - static_cast<std::int64_t>(offset_min) * 60;
}

inline std::string format_time(UtcTime t) {
  const CivilTime c = civil_of(t);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

// ---------------------------------------------------------------------------
// Locale-free numeric formatting (shortest round-trip form).
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool try_parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline bool try_parse_int(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

// ---------------------------------------------------------------------------
// Deterministic counter-based RNG (splitmix64). Same seed gives the same
// sequence on every platform; fork() derives independent substreams.
// ---------------------------------------------------------------------------

class RngStream {
public:
  explicit RngStream(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) fail(Errc::config, "next_below(0)");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Box-Muller; consumes two draws per call.
  double next_gaussian() {
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent substream keyed off the current state.
  RngStream fork(std::uint64_t key) const { return RngStream(mix(state_ ^ mix(key + 0x9E3779B97F4A7C15ull))); }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit, used for run-manifest content hashes.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xCBF29CE484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace dap
