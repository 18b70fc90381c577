#include "ixpscope/asndb.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace ixpscope {

namespace {

constexpr std::string_view kRegistryNames[] = {"afrinic", "apnic", "arin", "lacnic", "ripencc"};

// Delegated files use YYYYMMDD; "00000000" and empty mean unknown.
bool parse_compact_date(std::string_view s, std::optional<Date>& out) {
  out.reset();
  if (s.empty() || s == "00000000") return true;
  if (s.size() != 8) return false;
  std::string iso;
  iso.reserve(10);
  iso.append(s.substr(0, 4)).append("-").append(s.substr(4, 2)).append("-").append(s.substr(6, 2));
  out = parse_date(iso);
  return out.has_value();
}

std::string compact_date(const std::optional<Date>& d) {
  if (!d) return {};
  auto iso = format_date(*d);
  return iso.substr(0, 4) + iso.substr(5, 2) + iso.substr(8, 2);
}

std::optional<AllocationStatus> parse_status(std::string_view s) {
  if (s == "allocated") return AllocationStatus::allocated;
  if (s == "assigned") return AllocationStatus::assigned;
  return std::nullopt;
}

// True when `a` should be kept over `b` for the same ASN.
bool preferred(const AsnRecord& a, const AsnRecord& b) {
  if (a.date != b.date) return b.date < a.date;  // nullopt sorts first
  if (a.registry != b.registry) return a.registry < b.registry;
  if (a.country != b.country) return a.country < b.country;
  return a.status < b.status;
}

}  // namespace

std::string_view registry_name(Registry r) { return kRegistryNames[static_cast<int>(r)]; }

std::optional<Registry> parse_registry(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kRegistryNames[i] == name) return static_cast<Registry>(i);
  }
  return std::nullopt;
}

std::string_view status_name(AllocationStatus s) {
  return s == AllocationStatus::allocated ? "allocated" : "assigned";
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

DelegatedParse parse_delegated(std::istream& in, Registry registry) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw DataError("failed to read " + std::string(registry_name(registry)) + " delegated file");

  DelegatedParse result;
  result.source = {registry, sha256_hex(bytes)};

  std::size_t line_no = 0;
  std::istringstream lines(bytes);
  std::string raw;
  while (std::getline(lines, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto f = split(line, '|');
    auto skip = [&](std::string reason) { result.skipped.push_back({line_no, std::move(reason)}); };

    // Version line: version|registry|serial|records|startdate|enddate|UTCoffset
    if (!f.empty() && !f[0].empty() && (f[0].front() >= '0' && f[0].front() <= '9')) continue;
    // Summary line: registry|*|type|*|count|summary
    if (f.size() >= 6 && f[5] == "summary") continue;
    if (f.size() < 7) {
      skip("expected at least 7 fields, found " + std::to_string(f.size()));
      continue;
    }
    if (f[2] != "asn") continue;
    auto status = parse_status(f[6]);
    if (!status) {
      if (f[6] == "available" || f[6] == "reserved") continue;
      skip("unknown status '" + std::string(f[6]) + "'");
      continue;
    }
    auto cc = CountryCode::parse(f[1]);
    if (!cc) {
      skip("invalid country '" + std::string(f[1]) + "'");
      continue;
    }
    auto start = parse_asn(f[3]);
    if (!start) {
      skip("invalid start ASN '" + std::string(f[3]) + "'");
      continue;
    }
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), count);
    if (ec != std::errc{} || ptr != f[4].data() + f[4].size() || count == 0) {
      skip("invalid block size '" + std::string(f[4]) + "'");
      continue;
    }
    if (*start + count - 1 > 0xFFFFFFFFull) {
      skip("ASN block overflows 32 bits");
      continue;
    }
    std::optional<Date> date;
    if (!parse_compact_date(f[5], date)) {
      skip("invalid date '" + std::string(f[5]) + "'");
      continue;
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      result.records.push_back({static_cast<Asn>(*start + i), *cc, registry, *status, date});
    }
  }
  return result;
}

DelegatedParse parse_delegated_file(const std::filesystem::path& path, Registry registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + std::string(registry_name(registry)) + " delegated file '" +
                    path.string() + "'");
  }
  return parse_delegated(in, registry);
}

const AsnRecord* AsnDb::find(Asn asn) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), asn,
                             [](const AsnRecord& r, Asn a) { return r.asn < a; });
  if (it == records_.end() || it->asn != asn) return nullptr;
  return &*it;
}

std::optional<CountryCode> AsnDb::lookup(Asn asn) const {
  if (const auto* r = find(asn)) return r->country;
  return std::nullopt;
}

class AsnDbBuilder {
 public:
  void add(std::span<const AsnRecord> records) { all_.insert(all_.end(), records.begin(), records.end()); }
  void add_source(const SourceFile& s) { sources_.push_back(s); }
  void add_conflicts(std::size_t n) { conflicts_ += n; }

  AsnDb build() {
    std::sort(all_.begin(), all_.end(), [](const AsnRecord& a, const AsnRecord& b) {
      if (a.asn != b.asn) return a.asn < b.asn;
      return preferred(a, b);
    });
    AsnDb db;
    db.conflicts_ = conflicts_;
    for (const auto& r : all_) {
      if (!db.records_.empty() && db.records_.back().asn == r.asn) {
        ++db.conflicts_;
        continue;
      }
      db.records_.push_back(r);
    }
    std::sort(sources_.begin(), sources_.end());
    sources_.erase(std::unique(sources_.begin(), sources_.end()), sources_.end());
    db.sources_ = std::move(sources_);
    return db;
  }

  static AsnDb from_parts(std::vector<AsnRecord> records, std::vector<SourceFile> sources,
                          std::size_t conflicts) {
    AsnDb db;
    db.records_ = std::move(records);
    db.sources_ = std::move(sources);
    db.conflicts_ = conflicts;
    return db;
  }

 private:
  std::vector<AsnRecord> all_;
  std::vector<SourceFile> sources_;
  std::size_t conflicts_ = 0;
};

AsnDb merge(std::span<const DelegatedParse> inputs) {
  AsnDbBuilder b;
  for (const auto& in : inputs) {
    b.add(in.records);
    b.add_source(in.source);
  }
  return b.build();
}

AsnDb merge(std::span<const std::vector<AsnRecord>> inputs) {
  AsnDbBuilder b;
  for (const auto& in : inputs) b.add(in);
  return b.build();
}

AsnDb merge(std::span<const AsnDb> dbs) {
  AsnDbBuilder b;
  for (const auto& db : dbs) {
    b.add(db.records());
    for (const auto& s : db.sources()) b.add_source(s);
    b.add_conflicts(db.conflicts());
  }
  return b.build();
}

void write_asndb(std::ostream& out, const AsnDb& db) {
  out << "# ixpscope asndb v1\n";
  for (const auto& s : db.sources()) out << "# source|" << registry_name(s.registry) << '|' << s.sha256 << '\n';
  out << "# conflicts|" << db.conflicts() << '\n';
  out << "# records|" << db.size() << '\n';
  out << "# asn|country|registry|date|status\n";
  for (const auto& r : db.records()) {
    out << r.asn << '|' << r.country.str() << '|' << registry_name(r.registry) << '|'
        << compact_date(r.date) << '|' << status_name(r.status) << '\n';
  }
}

AsnDb read_asndb(std::istream& in) {
  std::vector<AsnRecord> records;
  std::vector<SourceFile> sources;
  std::size_t conflicts = 0;
  std::optional<std::size_t> declared;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw DataError("asndb line " + std::to_string(line_no) + ": " + why);
  };
  auto count_of = [&](std::string_view text) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) fail("bad count '" + std::string(text) + "'");
    return v;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto f = split(trim(line.substr(1)), '|');
      if (f[0] == "source" && f.size() == 3) {
        auto reg = parse_registry(f[1]);
        if (!reg) fail("unknown registry '" + std::string(f[1]) + "'");
        sources.push_back({*reg, std::string(f[2])});
      } else if (f[0] == "conflicts" && f.size() == 2) {
        conflicts = count_of(f[1]);
      } else if (f[0] == "records" && f.size() == 2) {
        declared = count_of(f[1]);
      }
      continue;
    }
    auto f = split(line, '|');
    if (f.size() != 5) fail("expected 5 fields");
    AsnRecord r;
    auto asn = parse_asn(f[0]);
    auto cc = CountryCode::parse(f[1]);
    auto reg = parse_registry(f[2]);
    auto st = parse_status(f[4]);
    if (!asn || !cc || !reg || !st || !parse_compact_date(f[3], r.date)) fail("malformed record");
    r.asn = *asn;
    r.country = *cc;
    r.registry = *reg;
    r.status = *st;
    if (!records.empty() && records.back().asn >= r.asn) fail("records not strictly ascending");
    records.push_back(r);
  }
  if (in.bad()) throw DataError("failed reading asndb");
  if (declared && *declared != records.size()) {
    throw DataError("asndb declares " + std::to_string(*declared) + " records but contains " +
                    std::to_string(records.size()));
  }
  std::sort(sources.begin(), sources.end());
  return AsnDbBuilder::from_parts(std::move(records), std::move(sources), conflicts);
}

AsnDb load_asndb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open asndb '" + path.string() + "'");
  return read_asndb(in);
}

}  // namespace ixpscope
