#include "ixpscope/pipeline.hpp"

namespace ixpscope {

TrackOutputs analyze_track(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                           const AnalysisParams& params) {
  TrackOutputs out;
  out.report = build_report(series, db, country, params.baseline, params.final_date, params.confirmation_window);
  out.series = build_series(series, db, country);
  out.origins = origin_presence(series, db, country);
  out.neighbors = neighbor_timeline(series, db, country);

  const auto needed = static_cast<std::size_t>(params.detector.trailing_window) + 1;
  if (out.series.points.size() < needed) {
    out.warnings.push_back(series.ixp + "/" + country.str() + ": " + std::to_string(out.series.points.size()) +
                           " points, dip detection needs " + std::to_string(needed));
    return out;
  }
  for (auto m : kAllMetrics) {
    auto events = detect_dips(out.series, m, params.detector);
    events = annotate(std::move(events), params.catalog, params.catalog_slack);
    out.events.insert(out.events.end(), events.begin(), events.end());
  }
  return out;
}

}  // namespace ixpscope
