#include "ixpscope/reachability.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>

namespace ixpscope {

std::string Percent1::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%lld", tenths < 0 ? "-" : "",
                static_cast<long long>(std::llabs(tenths) / 10), static_cast<long long>(std::llabs(tenths) % 10));
  return buf;
}

std::string Percent2::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", hundredths < 0 ? "-" : "",
                static_cast<long long>(std::llabs(hundredths) / 100),
                static_cast<long long>(std::llabs(hundredths) % 100));
  return buf;
}

Percent1 pct_lost(std::uint64_t total, std::uint64_t lost) {
  if (total == 0) throw std::invalid_argument("pct_lost: total is zero");
  if (lost > total) throw std::invalid_argument("pct_lost: lost exceeds total");
  return {static_cast<std::int64_t>((1000 * lost) / total)};
}

Percent2 average_pct(std::span<const Percent1> pcts) {
  if (pcts.empty()) throw std::invalid_argument("average_pct: empty list");
  std::int64_t sum = 0;
  for (auto p : pcts) sum += p.tenths;
  const auto n = static_cast<std::int64_t>(pcts.size());
  // hundredths = round_half_up(10 * sum / n), kept in integers.
  const std::int64_t num = 20 * sum + n;
  const std::int64_t den = 2 * n;
  std::int64_t q = num / den;
  if (num % den != 0 && num < 0) --q;
  return {q};
}

namespace {

const Snapshot& require_snapshot(const SnapshotSeries& series, Date d, const char* role) {
  const auto* s = series.at(d);
  if (!s) {
    throw DataError(std::string("no ") + role + " snapshot for " + series.ixp + " on " + format_date(d));
  }
  return *s;
}

std::set<Asn> origins_on(const Snapshot& snap, const AsnDb& db, CountryCode country) {
  std::set<Asn> out;
  for (const auto& e : snap.entries) {
    if (db.lookup(e.origin) == country) out.insert(e.origin);
  }
  return out;
}

std::set<Asn> all_origins_on(const Snapshot& snap) {
  std::set<Asn> out;
  for (const auto& e : snap.entries) out.insert(e.origin);
  return out;
}

}  // namespace

std::set<Asn> baseline_origins(const SnapshotSeries& series, const AsnDb& db, CountryCode country, Date baseline) {
  return origins_on(require_snapshot(series, baseline, "baseline"), db, country);
}

std::set<Asn> unreachable_origins(const SnapshotSeries& series, const AsnDb& db, CountryCode country,
                                  Date baseline, Date final_date, int window) {
  if (window < 0) throw std::invalid_argument("confirmation window must be >= 0");
  auto base = baseline_origins(series, db, country, baseline);
  const auto& final_snap = require_snapshot(series, final_date, "final");

  std::set<Asn> lost;
  const auto final_set = all_origins_on(final_snap);
  std::set_difference(base.begin(), base.end(), final_set.begin(), final_set.end(),
                      std::inserter(lost, lost.end()));
  for (int k = 1; k <= window && !lost.empty(); ++k) {
    const auto* snap = series.at(final_date - std::chrono::days{k});
    if (!snap) continue;
    for (const auto& e : snap->entries) lost.erase(e.origin);
  }
  return lost;
}

std::size_t offline_days(const PresenceMap& presence, Asn asn, DateRange window) {
  auto it = presence.presence.find(asn);
  if (it == presence.presence.end()) {
    throw std::invalid_argument("offline_days: AS" + std::to_string(asn) + " never observed");
  }
  std::size_t n = 0;
  for (Date d : presence.snapshot_dates) {
    if (window.contains(d) && !it->second.contains(d)) ++n;
  }
  return n;
}

PresenceMap neighbor_timeline(const SnapshotSeries& series, const AsnDb& db, CountryCode country) {
  PresenceMap out;
  out.snapshot_dates = series.dates();
  for (const auto& snap : series.snapshots) {
    for (const auto& e : snap.entries) {
      if (db.lookup(e.neighbor) == country) out.presence[e.neighbor].insert(snap.date);
    }
  }
  return out;
}

ReachabilityReport build_report(const SnapshotSeries& series, const AsnDb& db, CountryCode country, Date baseline,
                                Date final_date, int window) {
  if (!(baseline < final_date)) throw std::invalid_argument("baseline date must precede final date");
  ReachabilityReport r;
  r.ixp = series.ixp;
  r.country = country;
  r.baseline_date = baseline;
  r.final_date = final_date;
  r.confirmation_window = window;

  const auto base = baseline_origins(series, db, country, baseline);
  const auto lost = unreachable_origins(series, db, country, baseline, final_date, window);
  const auto lost0 = unreachable_origins(series, db, country, baseline, final_date, 0);
  const auto final_set = origins_on(require_snapshot(series, final_date, "final"), db, country);

  r.total_baseline = base.size();
  r.lost = lost.size();
  if (!base.empty()) r.pct_lost = pct_lost(r.total_baseline, r.lost);
  r.lost_asns.assign(lost.begin(), lost.end());
  std::set_difference(final_set.begin(), final_set.end(), base.begin(), base.end(), std::back_inserter(r.new_asns));
  std::set_difference(lost0.begin(), lost0.end(), lost.begin(), lost.end(), std::back_inserter(r.unconfirmed_asns));
  return r;
}

void write_report_kv(std::ostream& out, const ReachabilityReport& r) {
  out << "ixp=" << r.ixp << '\n'
      << "country=" << r.country.str() << '\n'
      << "baseline_date=" << format_date(r.baseline_date) << '\n'
      << "final_date=" << format_date(r.final_date) << '\n'
      << "confirmation_window=" << r.confirmation_window << '\n'
      << "total_baseline=" << r.total_baseline << '\n'
      << "lost=" << r.lost << '\n'
      << "pct_lost=" << (r.pct_lost ? r.pct_lost->str() : "n/a") << '\n'
      << "lost_asns=" << join_asns(r.lost_asns) << '\n'
      << "new_asns=" << join_asns(r.new_asns) << '\n'
      << "unconfirmed_asns=" << join_asns(r.unconfirmed_asns) << '\n';
}

ReachabilityReport read_report_kv(std::istream& in) {
  std::map<std::string, std::string, std::less<>> kv;
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError("report line without '=': " + std::string(line));
    kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("report is missing '" + std::string(key) + "'");
    return it->second;
  };
  auto asns = [&](std::string_view key) {
    std::vector<Asn> out;
    for (auto tok : split(get(key), ' ')) {
      if (tok.empty()) continue;
      auto a = parse_asn(tok);
      if (!a) throw DataError("report field '" + std::string(key) + "' has bad ASN");
      out.push_back(*a);
    }
    return out;
  };
  auto number = [&](std::string_view key) {
    try {
      return std::stoull(get(key));
    } catch (const std::logic_error&) {
      throw DataError("report field '" + std::string(key) + "' is not a number");
    }
  };

  ReachabilityReport r;
  r.ixp = get("ixp");
  auto cc = CountryCode::parse(get("country"));
  auto b = parse_date(get("baseline_date"));
  auto f = parse_date(get("final_date"));
  if (!cc || !b || !f) throw DataError("report has a bad country or date");
  r.country = *cc;
  r.baseline_date = *b;
  r.final_date = *f;
  r.confirmation_window = static_cast<int>(number("confirmation_window"));
  r.total_baseline = number("total_baseline");
  r.lost = number("lost");
  if (get("pct_lost") != "n/a") r.pct_lost = pct_lost(r.total_baseline, r.lost);
  r.lost_asns = asns("lost_asns");
  r.new_asns = asns("new_asns");
  r.unconfirmed_asns = asns("unconfirmed_asns");
  if (r.pct_lost && r.pct_lost->str() != get("pct_lost")) throw DataError("report pct_lost disagrees with counts");
  if (r.lost != r.lost_asns.size()) throw DataError("report lost count disagrees with lost_asns");
  return r;
}

void write_report_table(std::ostream& out, std::span<const ReachabilityReport> reports) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %-7s %10s %10s %8s\n", "IXP", "Country", "Total ASes", "Lost ASes", "% Lost");
  out << buf;
  for (const auto& r : reports) {
    std::string pct = r.pct_lost ? r.pct_lost->str() + "%" : "n/a";
    std::snprintf(buf, sizeof(buf), "%-10s %-7s %10llu %10llu %8s\n", r.ixp.c_str(), r.country.str().c_str(),
                  static_cast<unsigned long long>(r.total_baseline), static_cast<unsigned long long>(r.lost),
                  pct.c_str());
    out << buf;
  }
}

}  // namespace ixpscope
