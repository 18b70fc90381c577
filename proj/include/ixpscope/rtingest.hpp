// Route-server snapshot ingestion: one CSV per IXP per day, laid out as
// <root>/<ixp>/<YYYY-MM-DD>.csv.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ixpscope/asndb.hpp"
#include "ixpscope/core.hpp"

namespace ixpscope {

/// One announcement as seen by the route server. `origin` is the last
/// element of `as_path` and `neighbor` (the member AS connected to the IXP)
/// the first.
struct RouteEntry {
  std::string prefix;  // canonical CIDR text
  std::vector<Asn> as_path;
  Asn origin = 0;
  Asn neighbor = 0;

  bool operator==(const RouteEntry&) const = default;
};

/// Maps logical fields to CSV header names. Extra columns are ignored.
struct CsvSchema {
  std::string prefix_column = "prefix";
  std::string as_path_column = "as_path";
  std::optional<std::string> origin_column;
  std::optional<std::string> neighbor_column;

  bool operator==(const CsvSchema&) const = default;
};

/// Reads `key = value` lines (keys: prefix, as_path, origin, neighbor).
CsvSchema read_schema(std::istream& in);
CsvSchema load_schema(const std::filesystem::path& path);

enum class RowDefect {
  bad_quoting,
  field_count,
  bad_prefix,
  empty_path,
  bad_asn_token,
  as_set,
  endpoint_mismatch,
};

std::string_view defect_name(RowDefect d);

struct RowIssue {
  std::size_t line = 0;
  RowDefect defect = RowDefect::field_count;

  bool operator==(const RowIssue&) const = default;
};

struct Snapshot {
  std::string ixp;
  Date date{};
  std::vector<RouteEntry> entries;
  std::size_t skipped = 0;
  std::vector<RowIssue> issues;

  bool operator==(const Snapshot&) const = default;
};

/// Parses one snapshot. Throws DataError when the header lacks a mapped
/// column; defective rows are skipped and counted. Duplicate rows are kept,
/// each being a separate announcement.
Snapshot parse_snapshot(std::istream& in, const CsvSchema& schema, std::string ixp, Date date);

/// Collapses runs of the same ASN (AS-path prepending). Throws
/// std::invalid_argument on an empty path.
std::vector<Asn> normalize_path(std::span<const Asn> path);

/// Canonical CIDR text: host bits cleared, address in inet_ntop form.
std::optional<std::string> normalize_prefix(std::string_view text);

struct SnapshotSeries {
  std::string ixp;
  DateRange window{};
  std::vector<Snapshot> snapshots;  // strictly increasing dates
  std::vector<Date> gaps;           // window dates with no snapshot
  std::vector<std::string> warnings;

  const Snapshot* at(Date d) const;
  std::vector<Date> dates() const;
};

/// Loads every snapshot of `ixp` inside `window`. Missing or unreadable
/// files become gaps (the latter with a warning); an unreadable root throws
/// DataError.
SnapshotSeries load_series(const std::filesystem::path& root, const std::string& ixp,
                           DateRange window, const CsvSchema& schema = {});

/// Country of the route's origin AS, if known.
std::optional<CountryCode> attribute_country(const RouteEntry& entry, const AsnDb& db);

}  // namespace ixpscope
