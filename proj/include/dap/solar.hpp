#pragma once

// Local day/night labeling from solar geometry, replacing an external
// lookup service. Elevation comes from the NOAA low-accuracy solar position
// approximation (fractional year, equation of time, declination, hour angle),
// good to a few tenths of a degree over 1900-2100.

#include <cmath>

#include "dap/common.hpp"
#include "dap/geo.hpp"

namespace dap {

enum class DaylightSystem : int { sunrise_sunset = 0, civil = 1, nautical = 2, astronomical = 3 };

inline constexpr const char* kDaylightSystemNames[4] = {"sunrise-sunset", "civil", "nautical",
                                                        "astronomical"};

// Solar elevation threshold separating day from night under each system.
inline double daylight_threshold_deg(DaylightSystem s) {
  switch (s) {
    case DaylightSystem::sunrise_sunset: return -0.833;  // refraction + solar radius
    case DaylightSystem::civil: return -6.0;
    case DaylightSystem::nautical: return -12.0;
    case DaylightSystem::astronomical: return -18.0;
  }
  return 0.0;
}

namespace solardetail {

struct SolarAngles {
  double declination_rad;
  double eqtime_min;  // equation of time, minutes
};

// Fractional-year Fourier series for the equation of time and declination.
// The year angle is anchored at the 2000-01-01T12:00Z epoch and wraps at the
// mean tropical year, so the fit keeps its seasonal phase across 1900-2100
// instead of drifting with the calendar's leap cycle.
inline SolarAngles noaa_angles(UtcTime t) {
  const double days_since_epoch = static_cast<double>(t) / 86400.0 - 10957.5;
  double frac = std::fmod(days_since_epoch / 365.2422, 1.0);
  if (frac < 0) frac += 1.0;
  const double g = 2.0 * kPi * frac;

  SolarAngles a;
  a.eqtime_min = 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                           0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
  a.declination_rad = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                      0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                      0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
  return a;
}

}  // namespace solardetail

// Solar elevation in degrees at point p and UTC time t (valid 1900-2100).
inline double solar_elevation(const GeoPoint& p, UtcTime t) {
  const CivilTime c = civil_of(t);
  const auto angles = solardetail::noaa_angles(t);

  const double minutes_utc = c.hour * 60.0 + c.minute + c.second / 60.0;
  // True solar time in minutes; longitude east-positive, 4 minutes per degree.
  double tst = minutes_utc + angles.eqtime_min + 4.0 * p.lng;
  tst = std::fmod(tst, 1440.0);
  if (tst < 0) tst += 1440.0;
  const double hour_angle_rad = (tst / 4.0 - 180.0) * kDegToRad;

  const double lat_rad = p.lat * kDegToRad;
  const double cos_zenith = std::sin(lat_rad) * std::sin(angles.declination_rad) +
                            std::cos(lat_rad) * std::cos(angles.declination_rad) *
                                std::cos(hour_angle_rad);
  const double zenith_rad = std::acos(std::fmin(1.0, std::fmax(-1.0, cos_zenith)));
  return 90.0 - zenith_rad / kDegToRad;
}

enum class DayNight : int { night = 0, day = 1 };

inline DayNight period_of_day(const GeoPoint& p, UtcTime t, DaylightSystem system) {
  return solar_elevation(p, t) >= daylight_threshold_deg(system) ? DayNight::day : DayNight::night;
}

}  // namespace dap
