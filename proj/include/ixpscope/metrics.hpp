// Daily per-IXP per-country visibility metrics and their time series.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ixpscope/asndb.hpp"
#include "ixpscope/rtingest.hpp"

namespace ixpscope {

enum class Metric { announcements, distinct_origins, distinct_prefixes, distinct_neighbors };

inline constexpr std::array kAllMetrics = {Metric::announcements, Metric::distinct_origins,
                                           Metric::distinct_prefixes, Metric::distinct_neighbors};

std::string_view metric_name(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

struct DailyMetrics {
  std::string ixp;
  Date date{};
  CountryCode country;
  std::uint64_t announcements = 0;       // rows with an in-country origin
  std::uint64_t distinct_origins = 0;    // unique in-country origin ASNs
  std::uint64_t distinct_prefixes = 0;   // unique prefixes of those rows
  std::uint64_t distinct_neighbors = 0;  // unique first hops that are themselves in-country

  std::uint64_t value(Metric m) const;
  bool operator==(const DailyMetrics&) const = default;
};

/// Origin-side counts use the origin's country; the neighbor count uses
/// the neighbor's own country.
DailyMetrics compute_daily(const Snapshot& snapshot, const AsnDb& db, CountryCode country);

struct MetricSeries {
  std::string ixp;
  CountryCode country;
  std::vector<DailyMetrics> points;  // one per snapshot, no points on gaps
  std::vector<Date> gaps;

  bool operator==(const MetricSeries&) const = default;
};

MetricSeries build_series(const SnapshotSeries& series, const AsnDb& db, CountryCode country);

/// Dates on which each AS was seen, together with the full list of
/// snapshot dates so absences can be counted without the series.
struct PresenceMap {
  std::vector<Date> snapshot_dates;
  std::map<Asn, std::set<Date>> presence;

  bool operator==(const PresenceMap&) const = default;
};

/// Per in-country origin, the snapshot dates with at least one route from it.
PresenceMap origin_presence(const SnapshotSeries& series, const AsnDb& db, CountryCode country);

/// CSV `ixp,country,date,announcements,distinct_origins,distinct_prefixes,distinct_neighbors`.
void write_metrics_csv(std::ostream& out, std::span<const MetricSeries> series);
/// Reads rows back in file order. Throws DataError on a malformed file.
std::vector<DailyMetrics> read_metrics_csv(std::istream& in);

}  // namespace ixpscope
