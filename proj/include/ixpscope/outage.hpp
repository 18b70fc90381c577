// Dip (outage) detection over metric series and annotation against a
// catalog of known events.
//
// A day d with value v is a dip day when its reference r, the median of the
// up-to-N most recent earlier points, satisfies r >= min_reference and
// v < (1 - threshold) * r. Runs of consecutive dip points form one event.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ixpscope/metrics.hpp"

namespace ixpscope {

struct DetectorParams {
  int trailing_window = 7;
  double threshold = 0.05;
  double min_reference = 10.0;

  void validate() const;
};

struct OutageEvent {
  std::string ixp;
  CountryCode country;
  Metric metric = Metric::announcements;
  Date start{};
  Date end{};  // inclusive
  double reference_level = 0;
  double min_value = 0;
  double relative_drop = 0;
  std::string annotation;  // catalog id, empty when unmatched

  bool operator==(const OutageEvent&) const = default;
};

/// Throws std::invalid_argument on bad parameters or when the series has
/// fewer than trailing_window + 1 points.
std::vector<OutageEvent> detect_dips(const MetricSeries& series, Metric metric, const DetectorParams& params = {});

struct CatalogEvent {
  std::string id;
  std::optional<DateRange> dates;  // empty when the date is not known
  std::string label;
  std::string source;

  bool operator==(const CatalogEvent&) const = default;
};

/// Lines `id|start-date|end-date|label|source`; `#` starts a comment. Both
/// dates may be left empty for an event whose timing is unknown; such
/// entries are kept but never matched.
std::vector<CatalogEvent> read_catalog(std::istream& in);
std::vector<CatalogEvent> load_catalog(const std::filesystem::path& path);

/// Sets each event's annotation to the catalog entry whose range, widened
/// by `slack_days` on both sides, overlaps it the most (ties go to the
/// earliest catalog start, then the smallest id). Only `annotation` changes.
std::vector<OutageEvent> annotate(std::vector<OutageEvent> events, std::span<const CatalogEvent> catalog,
                                  int slack_days);

/// CSV `ixp,country,metric,start,end,reference,min,drop,annotation`.
void write_events_csv(std::ostream& out, std::span<const OutageEvent> events);
std::vector<OutageEvent> read_events_csv(std::istream& in);

}  // namespace ixpscope
