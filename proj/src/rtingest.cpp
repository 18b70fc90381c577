#include "ixpscope/rtingest.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <istream>
#include <thread>

#include "ixpscope/csv.hpp"

namespace ixpscope {

std::string_view defect_name(RowDefect d) {
  switch (d) {
    case RowDefect::bad_quoting: return "bad_quoting";
    case RowDefect::field_count: return "field_count";
    case RowDefect::bad_prefix: return "bad_prefix";
    case RowDefect::empty_path: return "empty_path";
    case RowDefect::bad_asn_token: return "bad_asn_token";
    case RowDefect::as_set: return "as_set";
    case RowDefect::endpoint_mismatch: return "endpoint_mismatch";
  }
  return "unknown";
}

CsvSchema read_schema(std::istream& in) {
  CsvSchema schema;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("schema line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    std::string value{trim(line.substr(eq + 1))};
    if (value.empty()) throw DataError("schema key '" + std::string(key) + "' has an empty column name");
    if (key == "prefix") {
      schema.prefix_column = value;
    } else if (key == "as_path") {
      schema.as_path_column = value;
    } else if (key == "origin") {
      schema.origin_column = value;
    } else if (key == "neighbor") {
      schema.neighbor_column = value;
    } else {
      throw DataError("schema line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  return schema;
}

CsvSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema '" + path.string() + "'");
  return read_schema(in);
}

std::optional<std::string> normalize_prefix(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 >= text.size()) return std::nullopt;
  std::string addr{text.substr(0, slash)};
  auto len_text = text.substr(slash + 1);
  if (len_text.size() > 3) return std::nullopt;
  unsigned len = 0;
  for (char c : len_text) {
    if (c < '0' || c > '9') return std::nullopt;
    len = len * 10 + static_cast<unsigned>(c - '0');
  }

  unsigned char bytes[16] = {};
  int family = addr.find(':') != std::string::npos ? AF_INET6 : AF_INET;
  unsigned max_len = family == AF_INET6 ? 128 : 32;
  if (len > max_len || inet_pton(family, addr.c_str(), bytes) != 1) return std::nullopt;

  for (unsigned bit = len; bit < max_len; ++bit) bytes[bit / 8] &= static_cast<unsigned char>(~(0x80u >> (bit % 8)));

  char buf[INET6_ADDRSTRLEN];
  if (!inet_ntop(family, bytes, buf, sizeof(buf))) return std::nullopt;
  std::string out = buf;
  out += '/';
  out += std::to_string(len);
  return out;
}

std::vector<Asn> normalize_path(std::span<const Asn> path) {
  if (path.empty()) throw std::invalid_argument("normalize_path: empty AS path");
  std::vector<Asn> out;
  out.reserve(path.size());
  for (Asn a : path) {
    if (out.empty() || out.back() != a) out.push_back(a);
  }
  return out;
}

namespace {

std::optional<RowDefect> parse_path(std::string_view cell, std::vector<Asn>& path) {
  path.clear();
  if (cell.find_first_of("{}") != std::string_view::npos) return RowDefect::as_set;
  std::size_t i = 0;
  while (i < cell.size()) {
    while (i < cell.size() && (cell[i] == ' ' || cell[i] == '\t')) ++i;
    if (i >= cell.size()) break;
    std::size_t j = i;
    while (j < cell.size() && cell[j] != ' ' && cell[j] != '\t') ++j;
    auto asn = parse_asn(cell.substr(i, j - i));
    if (!asn) return RowDefect::bad_asn_token;
    path.push_back(*asn);
    i = j;
  }
  if (path.empty()) return RowDefect::empty_path;
  return std::nullopt;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("snapshot header has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Snapshot parse_snapshot(std::istream& in, const CsvSchema& schema, std::string ixp, Date date) {
  Snapshot snap;
  snap.ixp = std::move(ixp);
  snap.date = date;

  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> fields;

  // Header: first non-blank line.
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    if (!csv::split_line(raw, fields)) throw DataError("snapshot header is not valid CSV");
    for (auto& f : fields) f = std::string(trim(f));
    have_header = true;
    break;
  }
  if (in.bad()) throw DataError("failed reading snapshot for " + snap.ixp + " " + format_date(date));
  if (!have_header) throw DataError("snapshot for " + snap.ixp + " " + format_date(date) + " has no header row");

  const std::vector<std::string> header = fields;
  const std::size_t prefix_col = column_index(header, schema.prefix_column);
  const std::size_t path_col = column_index(header, schema.as_path_column);
  std::optional<std::size_t> origin_col, neighbor_col;
  if (schema.origin_column) origin_col = column_index(header, *schema.origin_column);
  if (schema.neighbor_column) neighbor_col = column_index(header, *schema.neighbor_column);

  std::vector<Asn> path;
  auto skip = [&](RowDefect d) {
    ++snap.skipped;
    snap.issues.push_back({line_no, d});
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    if (!csv::split_line(raw, fields)) {
      skip(RowDefect::bad_quoting);
      continue;
    }
    if (fields.size() != header.size()) {
      skip(RowDefect::field_count);
      continue;
    }
    auto prefix = normalize_prefix(trim(fields[prefix_col]));
    if (!prefix) {
      skip(RowDefect::bad_prefix);
      continue;
    }
    if (auto defect = parse_path(fields[path_col], path)) {
      skip(*defect);
      continue;
    }
    RouteEntry e;
    e.prefix = std::move(*prefix);
    e.as_path = path;
    e.origin = path.back();
    e.neighbor = path.front();
    if (origin_col && parse_asn(trim(fields[*origin_col])) != e.origin) {
      skip(RowDefect::endpoint_mismatch);
      continue;
    }
    if (neighbor_col && parse_asn(trim(fields[*neighbor_col])) != e.neighbor) {
      skip(RowDefect::endpoint_mismatch);
      continue;
    }
    snap.entries.push_back(std::move(e));
  }
  if (in.bad()) throw DataError("failed reading snapshot for " + snap.ixp + " " + format_date(date));
  return snap;
}

const Snapshot* SnapshotSeries::at(Date d) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), d,
                             [](const Snapshot& s, Date x) { return s.date < x; });
  if (it == snapshots.end() || it->date != d) return nullptr;
  return &*it;
}

std::vector<Date> SnapshotSeries::dates() const {
  std::vector<Date> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(s.date);
  return out;
}

SnapshotSeries load_series(const std::filesystem::path& root, const std::string& ixp, DateRange window,
                           const CsvSchema& schema) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("snapshot root '" + root.string() + "' is not a readable directory");

  SnapshotSeries series;
  series.ixp = ixp;
  series.window = window;

  const auto days = window.dates();
  const fs::path dir = root / ixp;
  if (!fs::is_directory(dir, ec)) {
    series.gaps = days;
    series.warnings.push_back("no directory for IXP '" + ixp + "' under " + root.string());
    return series;
  }

  struct Slot {
    std::optional<Snapshot> snap;
    std::string warning;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(days.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < days.size(); i = next++) {
      auto& slot = slots[i];
      const fs::path file = dir / (format_date(days[i]) + ".csv");
      std::error_code fec;
      if (!fs::exists(file, fec)) continue;
      std::ifstream in(file, std::ios::binary);
      if (!in) {
        slot.warning = "cannot read " + file.string() + "; treating as gap";
        continue;
      }
      try {
        slot.snap = parse_snapshot(in, schema, ixp, days[i]);
      } catch (...) {
        slot.error = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < days.size(); ++i) {
    auto& slot = slots[i];
    if (slot.error) std::rethrow_exception(slot.error);
    if (!slot.warning.empty()) series.warnings.push_back(std::move(slot.warning));
    if (slot.snap) {
      series.snapshots.push_back(std::move(*slot.snap));
    } else {
      series.gaps.push_back(days[i]);
    }
  }
  return series;
}

std::optional<CountryCode> attribute_country(const RouteEntry& entry, const AsnDb& db) {
  return db.lookup(entry.origin);
}

}  // namespace ixpscope
