#pragma once

// Geodesic distance, grid-cell assignment and spatial queries.
//
// Distances are great-circle on a sphere of mean radius 6,371,000 m.
// Cell assignment uses an equirectangular projection anchored at the grid's
// southwest corner, so cells are metric squares locally; cells are half-open
// [south, north) x [west, east).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dap/common.hpp"

namespace dap {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kMetersPerDegLat = kEarthRadiusM * kDegToRad;  // ~111194.93

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lng = 0.0;  // degrees, [-180, 180]

  bool valid() const {
    return std::isfinite(lat) && std::isfinite(lng) && lat >= -90.0 && lat <= 90.0 &&
           lng >= -180.0 && lng <= 180.0;
  }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline void check_point(const GeoPoint& p, const char* what = "point") {
  if (!p.valid())
    fail(Errc::row_error, std::string(what) + " out of range: lat=" + format_double(p.lat) +
                              " lng=" + format_double(p.lng));
}

inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad, lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlng = (b.lng - a.lng) * kDegToRad;
  const double sl = std::sin(0.5 * dlat);
  const double sg = std::sin(0.5 * dlng);
  const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * sg * sg;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct GridSpec {
  GeoPoint anchor;             // southwest corner of the covered rectangle
  double cell_size_m = 5000.0;
  int rows = 1;
  int cols = 1;

  void validate() const {
    check_point(anchor, "grid anchor");
    if (!(cell_size_m > 0.0)) fail(Errc::config, "grid cell_size_m must be > 0");
    if (rows < 1 || cols < 1) fail(Errc::config, "grid rows/cols must be >= 1");
  }

  // Equirectangular offsets in meters from the anchor (north, east).
  double meters_north(const GeoPoint& p) const { return (p.lat - anchor.lat) * kMetersPerDegLat; }
  double meters_east(const GeoPoint& p) const {
    return (p.lng - anchor.lng) * kMetersPerDegLat * std::cos(anchor.lat * kDegToRad);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  GeoPoint cell_center(int row, int col) const {
    GeoPoint p;
    p.lat = anchor.lat + (row + 0.5) * cell_size_m / kMetersPerDegLat;
    p.lng = anchor.lng +
            (col + 0.5) * cell_size_m / (kMetersPerDegLat * std::cos(anchor.lat * kDegToRad));
    return p;
  }
};

struct CellId {
  int row = 0;
  int col = 0;
  int region_index = -1;  // dense index assigned by the region set; -1 = unassigned

  friend bool operator==(const CellId& a, const CellId& b) {
    return a.row == b.row && a.col == b.col;
  }
  friend auto operator<=>(const CellId& a, const CellId& b) {
    if (a.row != b.row) return a.row <=> b.row;
    return a.col <=> b.col;
  }
};

// Index math on projected offsets; the south/west edge belongs to the cell.
inline CellId cell_from_offsets(double north_m, double east_m, const GridSpec& g) {
  const int row = static_cast<int>(std::floor(north_m / g.cell_size_m));
  const int col = static_cast<int>(std::floor(east_m / g.cell_size_m));
  if (row < 0 || row >= g.rows || col < 0 || col >= g.cols)
    fail(Errc::out_of_grid, "point outside grid: offset north=" + format_double(north_m) +
                                "m east=" + format_double(east_m) + "m");
  return CellId{row, col, -1};
}

inline CellId cell_of(const GeoPoint& p, const GridSpec& g) {
  check_point(p);
  return cell_from_offsets(g.meters_north(p), g.meters_east(p), g);
}

// ---------------------------------------------------------------------------
// SpatialIndex: bucketed point store with radius / nearest queries.
// Immutable after construction. Query results match an exhaustive scan;
// ties break toward the lowest item id.
// ---------------------------------------------------------------------------

class SpatialIndex {
public:
  struct Item {
    GeoPoint pos;
    std::int64_t id = 0;  // caller-supplied key, used for deterministic tie-breaks
  };

  struct Hit {
    std::size_t index = 0;  // position in items()
    std::int64_t id = 0;
    double distance_m = 0.0;
  };

  SpatialIndex() = default;

  explicit SpatialIndex(std::vector<Item> items, double bucket_deg = 0.05)
      : items_(std::move(items)), bucket_deg_(bucket_deg) {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      check_point(items_[i].pos, "index item");
      buckets_[key_of(items_[i].pos)].push_back(i);
    }
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<Item>& items() const { return items_; }

  // All items with haversine distance <= radius_m, sorted by (distance, id).
  std::vector<Hit> within_radius(const GeoPoint& p, double radius_m) const {
    if (radius_m < 0.0) fail(Errc::invalid_radius, "negative radius");
    check_point(p, "query point");
    std::vector<Hit> hits;
    scan(p, radius_m, [&](std::size_t i, double d) { hits.push_back(Hit{i, items_[i].id, d}); });
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
      return a.id < b.id;
    });
    return hits;
  }

  Hit nearest(const GeoPoint& p) const {
    if (items_.empty()) fail(Errc::empty_index, "nearest() on empty index");
    check_point(p, "query point");
    // Grow the scan radius until something falls inside; items beyond the
    // scanned radius cannot beat a hit found within it.
    double r = std::max(bucket_deg_ * kMetersPerDegLat, 1000.0);
    const double half_circumference = kPi * kEarthRadiusM;
    for (;;) {
      bool found = false;
      Hit best{};
      scan(p, r, [&](std::size_t i, double d) {
        if (!found || d < best.distance_m || (d == best.distance_m && items_[i].id < best.id)) {
          best = Hit{i, items_[i].id, d};
          found = true;
        }
      });
      if (found) return best;
      if (r >= half_circumference) {
        // Radius covers the whole sphere yet nothing matched; unreachable
        // for a non-empty index.
        fail(Errc::empty_index, "nearest() scan exhausted");
      }
      r = std::min(r * 4.0, half_circumference);
    }
  }

private:
  using Key = std::int64_t;

  Key key_of(const GeoPoint& p) const {
    const auto r = static_cast<std::int64_t>(std::floor(p.lat / bucket_deg_));
    const auto c = static_cast<std::int64_t>(std::floor(p.lng / bucket_deg_));
    return r * 0x100000000ll + c;
  }

  // Half-width in longitude degrees of the spherical cap around p.
  static double lng_halfwidth_deg(const GeoPoint& p, double radius_m) {
    const double sigma = radius_m / kEarthRadiusM;
    if (sigma >= kPi / 2.0) return 180.0;
    const double cos_lat = std::cos(p.lat * kDegToRad);
    const double s = std::sin(sigma);
    if (s >= cos_lat) return 180.0;  // cap contains a pole
    return std::asin(s / cos_lat) / kDegToRad + 1e-7;
  }

  template <typename Fn>
  void scan(const GeoPoint& p, double radius_m, Fn&& fn) const {
    const double dlat_deg = radius_m / kMetersPerDegLat + 1e-7;
    const double dlng_deg = lng_halfwidth_deg(p, radius_m);
    const auto row_lo = static_cast<std::int64_t>(std::floor((p.lat - dlat_deg) / bucket_deg_));
    const auto row_hi = static_cast<std::int64_t>(std::floor((p.lat + dlat_deg) / bucket_deg_));

    auto visit_bucket = [&](std::int64_t row, std::int64_t col) {
      auto it = buckets_.find(row * 0x100000000ll + col);
      if (it == buckets_.end()) return;
      for (std::size_t i : it->second) {
        const double d = haversine_distance(p, items_[i].pos);
        if (d <= radius_m) fn(i, d);
      }
    };

    // Longitude windows within [-180, 180], split at the antimeridian.
    struct Window {
      double lo, hi;
    };
    Window windows[2];
    int nwin = 0;
    double lo = p.lng - dlng_deg, hi = p.lng + dlng_deg;
    if (hi - lo >= 360.0) {
      windows[nwin++] = {-180.0, 180.0};
    } else {
      if (lo < -180.0) {
        windows[nwin++] = {lo + 360.0, 180.0};
        lo = -180.0;
      }
      if (hi > 180.0) {
        windows[nwin++] = {-180.0, hi - 360.0};
        hi = 180.0;
      }
      windows[nwin++] = {lo, hi};
    }

    for (std::int64_t r = row_lo; r <= row_hi; ++r) {
      for (int w = 0; w < nwin; ++w) {
        const auto col_lo = static_cast<std::int64_t>(std::floor(windows[w].lo / bucket_deg_));
        const auto col_hi = static_cast<std::int64_t>(std::floor(windows[w].hi / bucket_deg_));
        for (std::int64_t c = col_lo; c <= col_hi; ++c) visit_bucket(r, c);
      }
    }
  }

  std::vector<Item> items_;
  double bucket_deg_ = 0.05;
  std::unordered_map<Key, std::vector<std::size_t>> buckets_;
};

}  // namespace dap
