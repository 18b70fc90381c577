// ASN -> country database built from RIR delegated(-extended) statistics.
//
// Each RIR publishes a pipe-separated file
//
//   registry|cc|type|start|value|date|status[|opaque-id[|extensions]]
//
// preceded by a version line and per-type summary lines. Only `asn` rows
// with status allocated or assigned are kept; `start`/`value` describe the
// contiguous block start .. start+value-1.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ixpscope/core.hpp"

namespace ixpscope {

// Enumerators are in ascending name order; merge tie-breaks rely on it.
enum class Registry { afrinic, apnic, arin, lacnic, ripencc };

std::string_view registry_name(Registry r);
std::optional<Registry> parse_registry(std::string_view name);

enum class AllocationStatus { allocated, assigned };

std::string_view status_name(AllocationStatus s);

struct AsnRecord {
  Asn asn = 0;
  CountryCode country;
  Registry registry = Registry::afrinic;
  AllocationStatus status = AllocationStatus::allocated;
  std::optional<Date> date;

  bool operator==(const AsnRecord&) const = default;
};

struct SkippedRow {
  std::size_t line = 0;
  std::string reason;
};

struct SourceFile {
  Registry registry = Registry::afrinic;
  std::string sha256;

  auto operator<=>(const SourceFile&) const = default;
};

/// Result of reading one delegated file.
struct DelegatedParse {
  SourceFile source;
  std::vector<AsnRecord> records;
  std::vector<SkippedRow> skipped;
};

/// Reads a delegated file. Comment, version, summary, non-asn and
/// available/reserved rows are ignored; malformed rows are recorded in
/// `skipped` and never abort the parse. Throws DataError if the stream
/// cannot be read.
DelegatedParse parse_delegated(std::istream& in, Registry registry);
DelegatedParse parse_delegated_file(const std::filesystem::path& path, Registry registry);

/// Immutable merged database. Records are unique per ASN and sorted.
class AsnDb {
 public:
  AsnDb() = default;

  const AsnRecord* find(Asn asn) const;
  std::optional<CountryCode> lookup(Asn asn) const;

  std::span<const AsnRecord> records() const { return records_; }
  std::span<const SourceFile> sources() const { return sources_; }
  std::size_t conflicts() const { return conflicts_; }
  std::size_t size() const { return records_.size(); }

  bool operator==(const AsnDb&) const = default;

 private:
  friend class AsnDbBuilder;

  std::vector<AsnRecord> records_;
  std::vector<SourceFile> sources_;
  std::size_t conflicts_ = 0;
};

/// Merges inputs into one database. When an ASN appears more than once the
/// record with the latest allocation date wins (a missing date counts as
/// earliest), then the lexicographically smallest registry name, then the
/// smallest country code. Every discarded duplicate increments
/// `conflicts`. The result does not depend on input order.
AsnDb merge(std::span<const DelegatedParse> inputs);
AsnDb merge(std::span<const std::vector<AsnRecord>> inputs);
/// Re-merging databases carries their provenance and conflict counts
/// forward, so merging a single database returns it unchanged.
AsnDb merge(std::span<const AsnDb> dbs);

/// Persisted form: header comments with provenance, then one
/// `asn|country|registry|date|status` line per record in ASN order.
void write_asndb(std::ostream& out, const AsnDb& db);
AsnDb read_asndb(std::istream& in);
AsnDb load_asndb(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace ixpscope
