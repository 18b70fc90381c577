// Deterministic synthetic IXP datasets with exact ground truth.
//
// A Scenario first plans, for every (IXP, country) track and every day,
// which announcements exist. Snapshot CSVs, a delegated-statistics file and
// the ground truth are then all emitted from that one plan, so the ground
// truth never depends on the analysis code it is used to check.
//
// Disruptions:
//   permanent_loss       baseline origins withdrawn for good, each on a
//                        random day inside the range
//   origin_removal       origins withdrawn for the range. A `count` picks
//                        that many origins (a flap); a `fraction` removes
//                        whole origins until at least that share of the
//                        track's announcements is gone (an outage)
//   prefix_shrink        that share (or count) of announcements withdrawn
//                        for the range (an outage)
//   neighbor_disconnect  in-country neighbors leave the route server; their
//                        routes are re-announced behind a foreign member
//   join                 new origins appear from the range start onwards
//
// Outage ground truth covers the `announcements` metric: one span per
// fraction-based origin_removal or prefix_shrink, clipped to snapshot days.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ixpscope/asndb.hpp"
#include "ixpscope/pipeline.hpp"
#include "ixpscope/rtingest.hpp"

namespace ixpscope {

enum class DisruptionKind { origin_removal, neighbor_disconnect, prefix_shrink, permanent_loss, join };

std::string_view disruption_name(DisruptionKind k);
std::optional<DisruptionKind> parse_disruption(std::string_view name);

struct Disruption {
  DisruptionKind kind = DisruptionKind::origin_removal;
  std::string ixp = "*";  // "*" applies to every IXP
  CountryCode country;
  DateRange dates{};
  std::uint32_t count = 0;  // exactly one of count / fraction is set
  double fraction = 0.0;

  bool operator==(const Disruption&) const = default;
};

struct CountryProfile {
  std::uint32_t origin_count = 0;
  std::uint32_t min_prefixes = 1;
  std::uint32_t max_prefixes = 3;
  std::uint32_t neighbor_count = 0;
  double local_share = 0.6;  // origins homed behind an in-country neighbor
  double multipath = 0.1;    // announcements also seen via a second member

  bool operator==(const CountryProfile&) const = default;
};

struct IxpProfile {
  std::string id;
  std::map<CountryCode, double> visibility;  // share of the country's origins seen; default 1
  std::vector<Date> missing_days;            // no snapshot file on these days

  bool operator==(const IxpProfile&) const = default;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  DateRange window{};
  int confirmation_window = 3;
  std::vector<IxpProfile> ixps;
  std::map<CountryCode, CountryProfile> countries;
  std::uint32_t background_origins = 20;
  std::vector<Disruption> disruptions;

  /// Throws std::invalid_argument describing the first violated rule.
  void validate() const;
  bool operator==(const ScenarioSpec&) const = default;
};

/// JSON scenario files.
ScenarioSpec read_scenario(std::istream& in);
ScenarioSpec load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);

struct GroundTruth {
  DateRange window{};
  int confirmation_window = 3;
  std::map<std::string, std::vector<Date>> gaps;  // per IXP
  std::map<TrackKey, std::vector<DailyMetrics>> metrics;
  std::map<TrackKey, std::vector<Asn>> unreachable;
  std::map<TrackKey, std::vector<Asn>> new_origins;
  std::map<TrackKey, std::map<Asn, std::size_t>> offline_days;
  std::map<TrackKey, std::vector<DateRange>> outages;

  bool operator==(const GroundTruth&) const = default;
};

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);

class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);
  ~Scenario();
  Scenario(Scenario&&) noexcept;
  Scenario& operator=(Scenario&&) noexcept;

  const ScenarioSpec& spec() const;

  /// Delegated-statistics text covering every generated ASN.
  std::string delegated_text() const;
  AsnDb asndb() const;

  /// Snapshot dates of one IXP (window minus missing days).
  std::vector<Date> snapshot_dates(const std::string& ixp) const;
  /// The CSV file the scenario emits for (ixp, date).
  std::string snapshot_csv(const std::string& ixp, Date date) const;
  /// The same snapshots built in memory, bypassing CSV.
  SnapshotSeries series(const std::string& ixp) const;

  /// ASNs picked by disruption `index` of the spec on `ixp` (origins or
  /// neighbors, depending on its kind).
  std::vector<Asn> targets(std::size_t index, const std::string& ixp) const;

  GroundTruth ground_truth() const;

 private:
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

/// Writes `<out>/<ixp>/<date>.csv`, `<out>/delegated.txt`,
/// `<out>/ground_truth.txt` and `<out>/scenario.json`. Throws DataError if
/// the directory cannot be written.
GroundTruth generate(const ScenarioSpec& spec, const std::filesystem::path& out);

struct Discrepancy {
  std::string category;  // metrics, gaps, unreachable, new, offline, outages, tracks
  std::string key;
  std::string expected;
  std::string actual;
};

/// Empty iff every metric point, reachability set, offline-day count and
/// announcement outage span matches.
std::vector<Discrepancy> verify(const GroundTruth& truth, const std::map<TrackKey, TrackOutputs>& outputs);

}  // namespace ixpscope
