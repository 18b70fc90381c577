#include "ixpscope/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "ixpscope/csv.hpp"

namespace ixpscope {

namespace {

constexpr std::string_view kMetricsHeader =
    "ixp,country,date,announcements,distinct_origins,distinct_prefixes,distinct_neighbors";

template <typename T>
std::size_t count_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::announcements: return "announcements";
    case Metric::distinct_origins: return "distinct_origins";
    case Metric::distinct_prefixes: return "distinct_prefixes";
    case Metric::distinct_neighbors: return "distinct_neighbors";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

std::uint64_t DailyMetrics::value(Metric m) const {
  switch (m) {
    case Metric::announcements: return announcements;
    case Metric::distinct_origins: return distinct_origins;
    case Metric::distinct_prefixes: return distinct_prefixes;
    case Metric::distinct_neighbors: return distinct_neighbors;
  }
  return 0;
}

DailyMetrics compute_daily(const Snapshot& snapshot, const AsnDb& db, CountryCode country) {
  DailyMetrics m;
  m.ixp = snapshot.ixp;
  m.date = snapshot.date;
  m.country = country;

  std::vector<Asn> origins;
  std::vector<std::string_view> prefixes;
  std::vector<Asn> neighbors;
  for (const auto& e : snapshot.entries) {
    if (db.lookup(e.origin) == country) {
      ++m.announcements;
      origins.push_back(e.origin);
      prefixes.push_back(e.prefix);
    }
    if (db.lookup(e.neighbor) == country) neighbors.push_back(e.neighbor);
  }
  m.distinct_origins = count_unique(origins);
  m.distinct_prefixes = count_unique(prefixes);
  m.distinct_neighbors = count_unique(neighbors);
  return m;
}

MetricSeries build_series(const SnapshotSeries& series, const AsnDb& db, CountryCode country) {
  MetricSeries out;
  out.ixp = series.ixp;
  out.country = country;
  out.gaps = series.gaps;
  out.points.reserve(series.snapshots.size());
  for (const auto& snap : series.snapshots) out.points.push_back(compute_daily(snap, db, country));
  return out;
}

PresenceMap origin_presence(const SnapshotSeries& series, const AsnDb& db, CountryCode country) {
  PresenceMap out;
  out.snapshot_dates = series.dates();
  for (const auto& snap : series.snapshots) {
    for (const auto& e : snap.entries) {
      if (db.lookup(e.origin) == country) out.presence[e.origin].insert(snap.date);
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricSeries> series) {
  out << kMetricsHeader << '\n';
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << csv::escape(p.ixp) << ',' << p.country.str() << ',' << format_date(p.date) << ','
          << p.announcements << ',' << p.distinct_origins << ',' << p.distinct_prefixes << ','
          << p.distinct_neighbors << '\n';
    }
  }
}

std::vector<DailyMetrics> read_metrics_csv(std::istream& in) {
  std::vector<DailyMetrics> rows;
  std::string raw;
  std::vector<std::string> f;
  std::size_t line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& why) {
    throw DataError("metrics CSV line " + std::to_string(line_no) + ": " + why);
  };
  auto count = [&](const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad count '" + s + "'");
    return v;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    if (!header) {
      if (trim(raw) != kMetricsHeader) fail("unexpected header");
      header = true;
      continue;
    }
    if (!csv::split_line(raw, f) || f.size() != 7) fail("expected 7 fields");
    DailyMetrics m;
    m.ixp = f[0];
    auto cc = CountryCode::parse(f[1]);
    auto d = parse_date(f[2]);
    if (!cc || !d) fail("bad country or date");
    m.country = *cc;
    m.date = *d;
    m.announcements = count(f[3]);
    m.distinct_origins = count(f[4]);
    m.distinct_prefixes = count(f[5]);
    m.distinct_neighbors = count(f[6]);
    rows.push_back(std::move(m));
  }
  if (!header) throw DataError("metrics CSV is empty");
  return rows;
}

}  // namespace ixpscope
