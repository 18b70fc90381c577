// Per-(IXP, country) analysis: metric series, reachability report, presence
// maps and detected outages from one loaded snapshot series.
#pragma once

#include <compare>
#include <string>
#include <vector>

#include "ixpscope/metrics.hpp"
#include "ixpscope/outage.hpp"
#include "ixpscope/reachability.hpp"

namespace ixpscope {

struct TrackKey {
  std::string ixp;
  CountryCode country;

  auto operator<=>(const TrackKey&) const = default;
};

struct AnalysisParams {
  Date baseline{};
  Date final_date{};
  int confirmation_window = 3;
  DetectorParams detector;
  std::vector<CatalogEvent> catalog;
  int catalog_slack = 1;
};

struct TrackOutputs {
  MetricSeries series;
  ReachabilityReport report;
  PresenceMap origins;
  PresenceMap neighbors;
  std::vector<OutageEvent> events;  // all metrics, sorted by metric then start
  std::vector<std::string> warnings;
};

/// Throws DataError when the baseline or final snapshot is missing. Dip
/// detection is skipped, with a warning, for series too short to have a
/// trailing reference.
TrackOutputs analyze_track(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                           const AnalysisParams& params);

}  // namespace ixpscope
