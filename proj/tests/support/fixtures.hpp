#pragma once

// Synthetic geometries with known ground truth, shared by unit and
// acceptance tests.

#include <string>
#include <vector>

#include "dap/augment.hpp"
#include "dap/records.hpp"
#include "support/oracles.hpp"

namespace fixtures {

// A calibration corpus where the regex/proximity association is perfect at
// exactly r_star meters and degrades on both sides:
//   - matching accidents carry a family POI planted strictly below r_star,
//     spread across the candidate gaps so the curve rises toward r_star;
//   - non-matching accidents carry a decoy family POI strictly above r_star,
//     spread across the gaps above so the curve falls past r_star.
struct CalibrationGeometry {
  std::vector<dap::EventRecord> accidents;
  std::vector<dap::PoiRecord> pois;
  std::vector<double> planted_match_dist;    // per matching accident
  std::vector<double> planted_decoy_dist;    // per non-matching accident
  double r_star = 0.0;
};

inline CalibrationGeometry make_calibration_geometry(double r_star, dap::AnnotationTarget family,
                                                     int n_match = 60, int n_nomatch = 60) {
  const auto& candidates = dap::default_candidate_radii();
  CalibrationGeometry g;
  g.r_star = r_star;

  std::vector<double> gaps_below;  // placement distances strictly <= r_star
  double prev = 0.0;
  for (double c : candidates) {
    if (c > r_star) break;
    gaps_below.push_back(prev + 0.6 * (c - prev));
    prev = c;
  }
  std::vector<double> gaps_above;
  prev = r_star;
  for (double c : candidates) {
    if (c <= r_star) continue;
    gaps_above.push_back(prev + 0.6 * (c - prev));
    prev = c;
  }

  const dap::GeoPoint anchor{40.0, -83.0};
  const auto family_types = dap::family_poi_types(family);
  int lattice = 0;
  auto next_site = [&]() {
    const int row = lattice / 40;
    const int col = lattice % 40;
    ++lattice;
    return oracles::offset_point(anchor, row * 2000.0, col * 2000.0);
  };

  for (int i = 0; i < n_match; ++i) {
    const dap::GeoPoint site = next_site();
    dap::EventRecord e;
    e.id = "M" + std::to_string(i);
    e.source = dap::Source::mapquest_like;
    e.etype = dap::EventType::accident;
    e.location = site;
    e.start_time = 1000000 + i * 1800;
    e.end_time = e.start_time + 600;
    e.description = family == dap::AnnotationTarget::junction
                        ? "Accident on I-80 at Exit " + std::to_string(i)
                        : "Accident on Main St at " + std::to_string(i) + "th Ave";
    g.accidents.push_back(e);
    const double d = gaps_below[i % gaps_below.size()];
    g.planted_match_dist.push_back(d);
    g.pois.push_back(
        {oracles::offset_point(site, d, 0.0), family_types[i % family_types.size()]});
  }
  for (int i = 0; i < n_nomatch; ++i) {
    const dap::GeoPoint site = next_site();
    dap::EventRecord e;
    e.id = "N" + std::to_string(i);
    e.source = dap::Source::bing_like;
    e.etype = dap::EventType::accident;
    e.location = site;
    e.start_time = 2000000 + i * 1800;
    e.end_time = e.start_time + 600;
    e.description = "Vehicle stopped near mile " + std::to_string(i);
    g.accidents.push_back(e);
    const double d = gaps_above[i % gaps_above.size()];
    g.planted_decoy_dist.push_back(d);
    g.pois.push_back(
        {oracles::offset_point(site, d, 0.0), family_types[i % family_types.size()]});
  }
  // Unrelated POI types far from every accident.
  for (int i = 0; i < 10; ++i) {
    g.pois.push_back({oracles::offset_point(anchor, i * 2000.0, -900.0), dap::PoiType::railway});
  }
  return g;
}

// Expected Jaccard curve computed from the planted distances alone.
inline std::vector<double> expected_calibration_scores(const CalibrationGeometry& g,
                                                       const std::vector<double>& candidates) {
  std::vector<double> scores;
  const double n_match = static_cast<double>(g.planted_match_dist.size());
  for (double tau : candidates) {
    double in_s2_match = 0;
    for (double d : g.planted_match_dist)
      if (d <= tau) ++in_s2_match;
    double decoys = 0;
    for (double d : g.planted_decoy_dist)
      if (d <= tau) ++decoys;
    const double inter = in_s2_match;
    const double uni = n_match + decoys;
    scores.push_back(uni == 0 ? 0.0 : inter / uni);
  }
  return scores;
}

}  // namespace fixtures
