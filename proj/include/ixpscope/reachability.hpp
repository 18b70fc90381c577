// Baseline-versus-final reachability: which origins vanished, what share of
// the baseline that is, and how long ASes were absent.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ixpscope/metrics.hpp"

namespace ixpscope {

/// A percentage with one decimal, stored as tenths of a percent.
struct Percent1 {
  std::int64_t tenths = 0;

  std::string str() const;
  auto operator<=>(const Percent1&) const = default;
};

/// A percentage with two decimals, stored as hundredths of a percent.
struct Percent2 {
  std::int64_t hundredths = 0;

  std::string str() const;
  auto operator<=>(const Percent2&) const = default;
};

/// floor(1000 * lost / total) / 10. Truncation, not rounding: 109 of 2886
/// is 3.7, not 3.8. Throws std::invalid_argument if total is zero or
/// lost exceeds total.
Percent1 pct_lost(std::uint64_t total, std::uint64_t lost);

/// Mean of already-truncated percentages, rounded half-up to two decimals.
/// Throws std::invalid_argument on an empty list.
Percent2 average_pct(std::span<const Percent1> pcts);

/// Distinct in-country origins on the baseline snapshot. Throws DataError
/// if the baseline date has no snapshot.
std::set<Asn> baseline_origins(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                               Date baseline);

/// Baseline origins absent on `final_date` and on every available snapshot
/// among the `window` calendar days before it. Gap days neither confirm nor
/// refute an absence. Throws DataError if either endpoint has no snapshot.
std::set<Asn> unreachable_origins(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                                  Date baseline, Date final_date, int window);

/// Snapshot dates in `window` on which `asn` is absent. Throws
/// std::invalid_argument for an AS the map has never seen.
std::size_t offline_days(const PresenceMap& presence, Asn asn, DateRange window);

/// Per in-country neighbor, the snapshot dates on which it is the first hop
/// of at least one route.
PresenceMap neighbor_timeline(const SnapshotSeries& series, const AsnDb& db, CountryCode country);

struct ReachabilityReport {
  std::string ixp;
  CountryCode country;
  Date baseline_date{};
  Date final_date{};
  int confirmation_window = 3;
  std::uint64_t total_baseline = 0;
  std::uint64_t lost = 0;
  std::optional<Percent1> pct_lost;  // empty when the baseline has no origins
  std::vector<Asn> lost_asns;        // sorted
  std::vector<Asn> new_asns;         // on final day, not in baseline; sorted
  /// Lost under a zero-day window but seen again inside the confirmation
  /// window, i.e. the difference the confirmation window makes.
  std::vector<Asn> unconfirmed_asns;

  bool operator==(const ReachabilityReport&) const = default;
};

ReachabilityReport build_report(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                                Date baseline, Date final_date, int window);

/// `key=value` lines; ASN lists are space separated.
void write_report_kv(std::ostream& out, const ReachabilityReport& report);
ReachabilityReport read_report_kv(std::istream& in);

/// Human-readable table: IXP, Total ASes, Lost ASes, % Lost.
void write_report_table(std::ostream& out, std::span<const ReachabilityReport> reports);

}  // namespace ixpscope
