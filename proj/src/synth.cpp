#include "ixpscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace ixpscope {

namespace {

using nlohmann::json;

constexpr Asn kFirstAsn = 100000;
constexpr Asn kUnknownAsnBase = 4200000000u;  // private range, never delegated
constexpr std::size_t kTransitMembers = 8;
constexpr std::size_t kUnknownRows = 3;

// Bounded draws and shuffles are written out so that output does not depend
// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const auto max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

int kind_priority(DisruptionKind k) {
  switch (k) {
    case DisruptionKind::join: return 0;
    case DisruptionKind::permanent_loss: return 1;
    case DisruptionKind::origin_removal: return 2;
    case DisruptionKind::prefix_shrink: return 3;
    case DisruptionKind::neighbor_disconnect: return 4;
  }
  return 5;
}

bool is_outage(const Disruption& d) {
  return d.kind == DisruptionKind::prefix_shrink ||
         (d.kind == DisruptionKind::origin_removal && d.fraction > 0.0);
}

std::string prefix_text(std::uint32_t id) {
  char buf[64];
  if (id % 5 == 4) {
    std::snprintf(buf, sizeof(buf), "2001:%x:%x::/48", 0x100u + (id >> 16), id & 0xffffu);
  } else {
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.0/24", 11u + (id >> 16), (id >> 8) & 0xffu, id & 0xffu);
  }
  return *normalize_prefix(buf);
}

bool valid_ixp_id(std::string_view id) {
  if (id.empty() || id == "*") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

}  // namespace

std::string_view disruption_name(DisruptionKind k) {
  switch (k) {
    case DisruptionKind::origin_removal: return "origin_removal";
    case DisruptionKind::neighbor_disconnect: return "neighbor_disconnect";
    case DisruptionKind::prefix_shrink: return "prefix_shrink";
    case DisruptionKind::permanent_loss: return "permanent_loss";
    case DisruptionKind::join: return "join";
  }
  return "unknown";
}

std::optional<DisruptionKind> parse_disruption(std::string_view name) {
  for (auto k : {DisruptionKind::origin_removal, DisruptionKind::neighbor_disconnect, DisruptionKind::prefix_shrink,
                 DisruptionKind::permanent_loss, DisruptionKind::join}) {
    if (disruption_name(k) == name) return k;
  }
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& why) { throw std::invalid_argument("scenario: " + why); };
  if (window.empty()) fail("window is empty");
  if (window.days() < 2) fail("window needs at least two days");
  if (confirmation_window < 0) fail("confirmation_window must be >= 0");
  if (ixps.empty()) fail("no IXPs");
  if (countries.empty()) fail("no countries");

  std::set<std::string> ids;
  for (const auto& x : ixps) {
    if (!valid_ixp_id(x.id)) fail("bad IXP id '" + x.id + "'");
    if (!ids.insert(x.id).second) fail("duplicate IXP '" + x.id + "'");
    for (const auto& [cc, v] : x.visibility) {
      if (!countries.contains(cc)) fail("visibility for unknown country " + cc.str());
      if (!(v >= 0.0 && v <= 1.0)) fail("visibility must be in [0, 1]");
    }
    for (Date d : x.missing_days) {
      if (!window.contains(d)) fail("missing day " + format_date(d) + " outside window");
      if (d == window.first || d == window.last) fail("baseline and final days cannot be missing");
    }
  }
  for (const auto& [cc, p] : countries) {
    if (cc.is_placeholder()) fail("ZZ is not a country");
    if (p.origin_count == 0) fail(cc.str() + ": origin_count must be >= 1");
    if (p.min_prefixes == 0 || p.min_prefixes > p.max_prefixes) fail(cc.str() + ": bad prefixes_per_origin");
    if (!(p.local_share >= 0.0 && p.local_share <= 1.0)) fail(cc.str() + ": local_share must be in [0, 1]");
    if (!(p.multipath >= 0.0 && p.multipath <= 1.0)) fail(cc.str() + ": multipath must be in [0, 1]");
  }
  for (std::size_t i = 0; i < disruptions.size(); ++i) {
    const auto& d = disruptions[i];
    const std::string where = "disruption " + std::to_string(i) + " (" + std::string(disruption_name(d.kind)) + ")";
    if (d.ixp != "*" && !ids.contains(d.ixp)) fail(where + ": unknown IXP '" + d.ixp + "'");
    if (!countries.contains(d.country)) fail(where + ": unknown country");
    if (d.dates.empty() || !window.contains(d.dates.first) || !window.contains(d.dates.last)) {
      fail(where + ": dates must lie inside the window");
    }
    const bool has_count = d.count > 0;
    const bool has_fraction = d.fraction > 0.0;
    if (has_count == has_fraction) fail(where + ": give exactly one of count or fraction");
    if (has_fraction && d.fraction > 1.0) fail(where + ": fraction must be in (0, 1]");
    if ((d.kind == DisruptionKind::join || d.kind == DisruptionKind::neighbor_disconnect) && !has_count) {
      fail(where + ": needs a count");
    }
    if ((d.kind == DisruptionKind::join || d.kind == DisruptionKind::permanent_loss) && d.dates.first == window.first) {
      fail(where + ": cannot start on the baseline day");
    }
  }
}

ScenarioSpec read_scenario(std::istream& in) {
  ScenarioSpec spec;
  try {
    json j = json::parse(in);
    auto date_of = [](const json& v) { return date_from_string(v.get<std::string>()); };
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.window = {date_of(j.at("window").at("start")), date_of(j.at("window").at("end"))};
    spec.confirmation_window = j.value("confirmation_window", 3);
    spec.background_origins = j.value("background_origins", 20u);
    for (const auto& x : j.at("ixps")) {
      IxpProfile p;
      if (x.is_string()) {
        p.id = x.get<std::string>();
      } else {
        p.id = x.at("id").get<std::string>();
        if (x.contains("visibility")) {
          for (const auto& [cc, v] : x.at("visibility").items()) p.visibility[country(cc)] = v.get<double>();
        }
        if (x.contains("missing_days")) {
          for (const auto& d : x.at("missing_days")) p.missing_days.push_back(date_of(d));
        }
      }
      spec.ixps.push_back(std::move(p));
    }
    for (const auto& [cc, c] : j.at("countries").items()) {
      CountryProfile p;
      p.origin_count = c.at("origin_count").get<std::uint32_t>();
      if (c.contains("prefixes_per_origin")) {
        p.min_prefixes = c.at("prefixes_per_origin").at(0).get<std::uint32_t>();
        p.max_prefixes = c.at("prefixes_per_origin").at(1).get<std::uint32_t>();
      }
      p.neighbor_count = c.value("neighbor_count", 0u);
      p.local_share = c.value("local_share", p.local_share);
      p.multipath = c.value("multipath", p.multipath);
      spec.countries[country(cc)] = p;
    }
    if (j.contains("disruptions")) {
      for (const auto& d : j.at("disruptions")) {
        Disruption x;
        auto kind = parse_disruption(d.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("unknown disruption kind " + d.at("kind").dump());
        x.kind = *kind;
        x.ixp = d.value("ixp", std::string("*"));
        x.country = country(d.at("country").get<std::string>());
        x.dates.first = date_of(d.at("start"));
        x.dates.last = d.contains("end") ? date_of(d.at("end")) : x.dates.first;
        x.count = d.value("count", 0u);
        x.fraction = d.value("fraction", 0.0);
        spec.disruptions.push_back(x);
      }
    }
    spec.validate();
  } catch (const json::exception& e) {
    throw DataError(std::string("bad scenario file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad scenario file: ") + e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario '" + path.string() + "'");
  return read_scenario(in);
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
  json j;
  j["seed"] = spec.seed;
  j["window"] = {{"start", format_date(spec.window.first)}, {"end", format_date(spec.window.last)}};
  j["confirmation_window"] = spec.confirmation_window;
  j["background_origins"] = spec.background_origins;
  j["ixps"] = json::array();
  for (const auto& x : spec.ixps) {
    json p = {{"id", x.id}};
    if (!x.visibility.empty()) {
      json v = json::object();
      for (const auto& [cc, f] : x.visibility) v[cc.str()] = f;
      p["visibility"] = v;
    }
    if (!x.missing_days.empty()) {
      json m = json::array();
      for (Date d : x.missing_days) m.push_back(format_date(d));
      p["missing_days"] = m;
    }
    j["ixps"].push_back(p);
  }
  j["countries"] = json::object();
  for (const auto& [cc, p] : spec.countries) {
    j["countries"][cc.str()] = {{"origin_count", p.origin_count},
                                {"prefixes_per_origin", {p.min_prefixes, p.max_prefixes}},
                                {"neighbor_count", p.neighbor_count},
                                {"local_share", p.local_share},
                                {"multipath", p.multipath}};
  }
  j["disruptions"] = json::array();
  for (const auto& d : spec.disruptions) {
    json x = {{"kind", disruption_name(d.kind)},
              {"ixp", d.ixp},
              {"country", d.country.str()},
              {"start", format_date(d.dates.first)},
              {"end", format_date(d.dates.last)}};
    if (d.count > 0) x["count"] = d.count;
    if (d.fraction > 0.0) x["fraction"] = d.fraction;
    j["disruptions"].push_back(x);
  }
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Planning

namespace {

struct Ann {
  std::uint32_t prefix = 0;
  std::uint32_t slot = 0;  // origin index within the track
  Asn neighbor = 0;
  Asn transit = 0;  // optional middle hop
  std::uint8_t prepend = 0;
};

struct TrackPlan {
  std::string ixp;
  CountryCode country;
  std::vector<Asn> origins;
  std::vector<Ann> anns;
  std::vector<std::vector<std::uint32_t>> anns_of;
  std::vector<std::vector<char>> absent;     // [slot][day]
  std::vector<std::vector<char>> withdrawn;  // [day][ann]
  std::vector<std::vector<Asn>> disconnected;  // [day]
  std::vector<char> permanent;               // [slot]
  std::vector<DateRange> outages;

  bool active(std::size_t day, std::uint32_t ann) const {
    return !absent[anns[ann].slot][day] && !withdrawn[day][ann];
  }
  bool is_disconnected(std::size_t day, Asn n) const {
    const auto& v = disconnected[day];
    return std::find(v.begin(), v.end(), n) != v.end();
  }
};

struct Block {
  Asn start;
  std::uint32_t count;
  CountryCode country;
};

}  // namespace

struct Scenario::Plan {
  ScenarioSpec spec;
  std::vector<Date> days;
  CountryCode foreign;
  std::vector<Block> blocks;
  std::vector<std::string> prefixes;  // by id
  std::unordered_map<Asn, std::vector<std::uint32_t>> prefixes_of;
  std::map<CountryCode, std::vector<Asn>> pool;
  std::map<CountryCode, std::vector<Asn>> local_neighbors;
  std::map<std::size_t, std::vector<Asn>> join_asns;  // by disruption index
  std::vector<Asn> transit;
  std::vector<Asn> background;
  std::vector<TrackPlan> tracks;
  std::map<std::pair<std::size_t, std::string>, std::vector<Asn>> targets;
  std::map<std::string, std::set<Date>> missing;

  Asn next_asn = kFirstAsn;
  std::uint32_t next_prefix = 0;

  explicit Plan(ScenarioSpec s);

  std::vector<Asn> allocate(std::uint32_t n, CountryCode cc) {
    std::vector<Asn> out(n);
    for (auto& a : out) a = next_asn++;
    if (n > 0) blocks.push_back({out.front(), n, cc});
    return out;
  }

  void give_prefixes(Rng& rng, Asn asn, std::uint32_t lo, std::uint32_t hi) {
    const auto n = lo + static_cast<std::uint32_t>(rng.below(hi - lo + 1));
    auto& v = prefixes_of[asn];
    for (std::uint32_t i = 0; i < n; ++i) {
      v.push_back(next_prefix++);
      prefixes.push_back(prefix_text(v.back()));
    }
  }

  std::size_t day_index(Date d) const { return static_cast<std::size_t>((d - spec.window.first).count()); }

  bool is_missing(const std::string& ixp, std::size_t day) const {
    auto it = missing.find(ixp);
    return it != missing.end() && it->second.contains(days[day]);
  }

  void build_track(Rng& rng, const IxpProfile& ixp, CountryCode cc, const CountryProfile& profile);
  void apply(Rng& rng, TrackPlan& t, std::size_t index, const Disruption& d);

  template <typename Fn>
  void for_each_row(const TrackPlan& t, std::size_t day, Fn&& fn) const {
    std::vector<Asn> path;
    for (std::uint32_t i = 0; i < t.anns.size(); ++i) {
      if (!t.active(day, i)) continue;
      const auto& a = t.anns[i];
      path.clear();
      if (t.is_disconnected(day, a.neighbor)) path.push_back(transit.front());
      path.push_back(a.neighbor);
      if (a.transit) path.push_back(a.transit);
      for (int k = 0; k <= a.prepend; ++k) path.push_back(t.origins[a.slot]);
      fn(a.prefix, path);
    }
  }

  template <typename Fn>
  void for_each_background_row(Fn&& fn) const {
    std::vector<Asn> path;
    for (std::size_t i = 0; i < background.size(); ++i) {
      path = {transit[i % transit.size()], background[i]};
      fn(prefixes_of.at(background[i]).front(), path);
    }
    for (std::size_t i = 0; i < kUnknownRows; ++i) {
      path = {transit[(i + 1) % transit.size()], static_cast<Asn>(kUnknownAsnBase + i)};
      fn(static_cast<std::uint32_t>(prefixes.size() - kUnknownRows + i), path);
    }
  }
};

Scenario::Plan::Plan(ScenarioSpec s) : spec(std::move(s)) {
  spec.validate();
  days = spec.window.dates();
  for (const auto& x : spec.ixps) missing[x.id].insert(x.missing_days.begin(), x.missing_days.end());

  for (auto code : {"NL", "DE", "GB", "FR", "SE", "JP"}) {
    if (!spec.countries.contains(country(code))) {
      foreign = country(code);
      break;
    }
  }

  Rng rng(spec.seed);
  for (const auto& [cc, p] : spec.countries) {
    pool[cc] = allocate(p.origin_count, cc);
    for (Asn a : pool[cc]) give_prefixes(rng, a, p.min_prefixes, p.max_prefixes);
    local_neighbors[cc] = allocate(p.neighbor_count, cc);
  }
  for (std::size_t i = 0; i < spec.disruptions.size(); ++i) {
    const auto& d = spec.disruptions[i];
    if (d.kind != DisruptionKind::join) continue;
    const auto& p = spec.countries.at(d.country);
    join_asns[i] = allocate(d.count, d.country);
    for (Asn a : join_asns[i]) give_prefixes(rng, a, p.min_prefixes, p.max_prefixes);
  }
  transit = allocate(kTransitMembers, foreign);
  background = allocate(spec.background_origins, foreign);
  for (Asn a : background) give_prefixes(rng, a, 1, 1);
  for (std::size_t i = 0; i < kUnknownRows; ++i) prefixes.push_back(prefix_text(next_prefix++));

  for (const auto& x : spec.ixps) {
    for (const auto& [cc, p] : spec.countries) build_track(rng, x, cc, p);
  }

  std::vector<std::size_t> order(spec.disruptions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kind_priority(spec.disruptions[a].kind) < kind_priority(spec.disruptions[b].kind);
  });
  for (auto& t : tracks) {
    for (std::size_t i : order) {
      const auto& d = spec.disruptions[i];
      if ((d.ixp == "*" || d.ixp == t.ixp) && d.country == t.country) apply(rng, t, i, d);
    }
  }
}

void Scenario::Plan::build_track(Rng& rng, const IxpProfile& ixp, CountryCode cc, const CountryProfile& profile) {
  TrackPlan t;
  t.ixp = ixp.id;
  t.country = cc;
  const std::size_t ndays = days.size();

  auto vis_it = ixp.visibility.find(cc);
  const double visibility = vis_it == ixp.visibility.end() ? 1.0 : vis_it->second;
  auto origins = pool.at(cc);
  rng.shuffle(origins);
  origins.resize(static_cast<std::size_t>(std::llround(visibility * static_cast<double>(origins.size()))));
  std::sort(origins.begin(), origins.end());

  // Joins scheduled on this track extend the origin list.
  std::vector<std::pair<std::size_t, std::size_t>> join_slots;  // slot, first day
  for (const auto& [idx, asns] : join_asns) {
    const auto& d = spec.disruptions[idx];
    if (d.country != cc || (d.ixp != "*" && d.ixp != ixp.id)) continue;
    for (Asn a : asns) {
      join_slots.emplace_back(origins.size(), day_index(d.dates.first));
      origins.push_back(a);
    }
  }
  t.origins = origins;
  t.anns_of.resize(origins.size());
  t.absent.assign(origins.size(), std::vector<char>(ndays, 0));
  t.permanent.assign(origins.size(), 0);
  for (auto [slot, first] : join_slots) {
    std::fill(t.absent[slot].begin(), t.absent[slot].begin() + static_cast<std::ptrdiff_t>(first), 1);
  }

  const auto& locals = local_neighbors.at(cc);
  std::vector<std::uint32_t> order(origins.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<Asn> home(origins.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < locals.size()) {
      home[order[k]] = locals[k];  // every local neighbor carries something
    } else if (!locals.empty() && rng.unit() < profile.local_share) {
      home[order[k]] = locals[rng.below(locals.size())];
    } else {
      home[order[k]] = transit[rng.below(transit.size())];
    }
  }

  for (std::uint32_t slot = 0; slot < origins.size(); ++slot) {
    for (std::uint32_t prefix : prefixes_of.at(origins[slot])) {
      Ann a;
      a.prefix = prefix;
      a.slot = slot;
      a.neighbor = home[slot];
      if (rng.unit() < 0.3) {
        a.transit = transit[rng.below(transit.size())];
        if (a.transit == a.neighbor) a.transit = 0;
      }
      if (rng.unit() < 0.2) a.prepend = static_cast<std::uint8_t>(1 + rng.below(2));
      t.anns_of[slot].push_back(static_cast<std::uint32_t>(t.anns.size()));
      t.anns.push_back(a);
      if (rng.unit() < profile.multipath) {
        Ann b;
        b.prefix = prefix;
        b.slot = slot;
        b.neighbor = transit[rng.below(transit.size())];
        t.anns_of[slot].push_back(static_cast<std::uint32_t>(t.anns.size()));
        t.anns.push_back(b);
      }
    }
  }
  t.withdrawn.assign(ndays, std::vector<char>(t.anns.size(), 0));
  t.disconnected.assign(ndays, {});
  tracks.push_back(std::move(t));
}

void Scenario::Plan::apply(Rng& rng, TrackPlan& t, std::size_t index, const Disruption& d) {
  const std::size_t a = day_index(d.dates.first);
  const std::size_t b = day_index(d.dates.last);
  const std::size_t ndays = days.size();
  auto& chosen = targets[{index, t.ixp}];
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("disruption " + std::to_string(index) + " on " + t.ixp + "/" + t.country.str() +
                                ": " + why);
  };
  auto active_anns_of = [&](std::uint32_t slot, std::size_t day) {
    std::size_t n = 0;
    for (auto i : t.anns_of[slot]) n += t.active(day, i);
    return n;
  };
  auto free_over_range = [&](std::uint32_t slot) {
    if (t.permanent[slot]) return false;
    for (std::size_t day = a; day <= b; ++day) {
      if (t.absent[slot][day]) return false;
    }
    return true;
  };

  switch (d.kind) {
    case DisruptionKind::join: {
      chosen = join_asns.at(index);
      break;
    }
    case DisruptionKind::permanent_loss: {
      std::vector<std::uint32_t> cand;
      for (std::uint32_t s = 0; s < t.origins.size(); ++s) {
        if (!t.absent[s][0] && !t.permanent[s]) cand.push_back(s);
      }
      const std::size_t n = d.count > 0
                                ? d.count
                                : static_cast<std::size_t>(std::ceil(d.fraction * static_cast<double>(cand.size())));
      if (n > cand.size()) fail("not enough baseline origins");
      rng.shuffle(cand);
      cand.resize(n);
      for (auto s : cand) {
        const std::size_t day = a + rng.below(b - a + 1);
        std::fill(t.absent[s].begin() + static_cast<std::ptrdiff_t>(day), t.absent[s].end(), 1);
        t.permanent[s] = 1;
        chosen.push_back(t.origins[s]);
      }
      break;
    }
    case DisruptionKind::origin_removal: {
      std::vector<std::uint32_t> cand;
      for (std::uint32_t s = 0; s < t.origins.size(); ++s) {
        if (free_over_range(s)) cand.push_back(s);
      }
      rng.shuffle(cand);
      std::vector<std::uint32_t> pick;
      if (d.count > 0) {
        if (d.count > cand.size()) fail("not enough origins");
        pick.assign(cand.begin(), cand.begin() + d.count);
      } else {
        std::size_t total = 0;
        for (std::uint32_t i = 0; i < t.anns.size(); ++i) total += t.active(a, i);
        const auto need = static_cast<std::size_t>(std::ceil(d.fraction * static_cast<double>(total)));
        std::size_t removed = 0;
        for (auto s : cand) {
          if (removed >= need) break;
          const auto n = active_anns_of(s, a);
          if (n == 0) continue;
          pick.push_back(s);
          removed += n;
        }
        if (removed < need) fail("cannot remove the requested share");
      }
      for (auto s : pick) {
        for (std::size_t day = a; day <= b; ++day) t.absent[s][day] = 1;
        chosen.push_back(t.origins[s]);
      }
      break;
    }
    case DisruptionKind::prefix_shrink: {
      std::vector<std::uint32_t> cand;
      for (std::uint32_t i = 0; i < t.anns.size(); ++i) {
        if (t.active(a, i)) cand.push_back(i);
      }
      const std::size_t n = d.count > 0
                                ? d.count
                                : static_cast<std::size_t>(std::ceil(d.fraction * static_cast<double>(cand.size())));
      if (n > cand.size()) fail("not enough announcements");
      rng.shuffle(cand);
      cand.resize(n);
      std::sort(cand.begin(), cand.end());
      std::set<Asn> hit;
      for (auto i : cand) {
        for (std::size_t day = a; day <= b; ++day) t.withdrawn[day][i] = 1;
        hit.insert(t.origins[t.anns[i].slot]);
      }
      chosen.assign(hit.begin(), hit.end());
      break;
    }
    case DisruptionKind::neighbor_disconnect: {
      std::set<Asn> used;
      const auto& locals = local_neighbors.at(t.country);
      for (const auto& ann : t.anns) {
        if (std::find(locals.begin(), locals.end(), ann.neighbor) != locals.end()) used.insert(ann.neighbor);
      }
      std::vector<Asn> cand;
      for (Asn n : used) {
        bool busy = false;
        for (std::size_t day = a; day <= b && !busy; ++day) busy = t.is_disconnected(day, n);
        if (!busy) cand.push_back(n);
      }
      if (d.count > cand.size()) fail("not enough in-country neighbors");
      rng.shuffle(cand);
      cand.resize(d.count);
      for (Asn n : cand) {
        for (std::size_t day = a; day <= b; ++day) t.disconnected[day].push_back(n);
      }
      std::sort(cand.begin(), cand.end());
      chosen = cand;
      break;
    }
  }
  std::sort(chosen.begin(), chosen.end());

  if (is_outage(d)) {
    std::optional<std::size_t> first, last;
    for (std::size_t day = a; day <= b && day < ndays; ++day) {
      if (is_missing(t.ixp, day)) continue;
      if (!first) first = day;
      last = day;
    }
    if (first) t.outages.push_back({days[*first], days[*last]});
  }
}

Scenario::Scenario(ScenarioSpec spec) : plan_(std::make_unique<Plan>(std::move(spec))) {}
Scenario::~Scenario() = default;
Scenario::Scenario(Scenario&&) noexcept = default;
Scenario& Scenario::operator=(Scenario&&) noexcept = default;

const ScenarioSpec& Scenario::spec() const { return plan_->spec; }

std::string Scenario::delegated_text() const {
  const auto& p = *plan_;
  // Blocks are split into runs of 1..32 ASNs to exercise range expansion.
  Rng rng(p.spec.seed ^ 0x5eed0fdeadbeefULL);
  std::ostringstream rows;
  std::size_t nrows = 0;
  for (const auto& blk : p.blocks) {
    std::uint32_t done = 0;
    while (done < blk.count) {
      const auto run = std::min<std::uint32_t>(blk.count - done, 1 + static_cast<std::uint32_t>(rng.below(32)));
      rows << "ripencc|" << blk.country.str() << "|asn|" << (blk.start + done) << '|' << run << "|20100101|"
           << (nrows % 3 == 0 ? "assigned" : "allocated") << '\n';
      done += run;
      ++nrows;
    }
  }
  std::ostringstream out;
  out << "# synthetic delegated statistics\n";
  out << "2|ripencc|20220101|" << nrows << "|19930101|20220101|+0000\n";
  out << "ripencc|*|asn|*|" << nrows << "|summary\n";
  out << rows.str();
  return out.str();
}

AsnDb Scenario::asndb() const {
  std::istringstream in(delegated_text());
  std::vector<DelegatedParse> parsed{parse_delegated(in, Registry::ripencc)};
  return merge(std::span<const DelegatedParse>(parsed));
}

std::vector<Date> Scenario::snapshot_dates(const std::string& ixp) const {
  std::vector<Date> out;
  for (std::size_t d = 0; d < plan_->days.size(); ++d) {
    if (!plan_->is_missing(ixp, d)) out.push_back(plan_->days[d]);
  }
  return out;
}

std::string Scenario::snapshot_csv(const std::string& ixp, Date date) const {
  const auto& p = *plan_;
  const auto day = p.day_index(date);
  std::string out = "prefix,as_path\n";
  auto emit = [&](std::uint32_t prefix, const std::vector<Asn>& path) {
    out += p.prefixes[prefix];
    out += ',';
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(path[i]);
    }
    out += '\n';
  };
  for (const auto& t : p.tracks) {
    if (t.ixp == ixp) p.for_each_row(t, day, emit);
  }
  p.for_each_background_row(emit);
  return out;
}

SnapshotSeries Scenario::series(const std::string& ixp) const {
  const auto& p = *plan_;
  SnapshotSeries s;
  s.ixp = ixp;
  s.window = p.spec.window;
  for (std::size_t day = 0; day < p.days.size(); ++day) {
    if (p.is_missing(ixp, day)) {
      s.gaps.push_back(p.days[day]);
      continue;
    }
    Snapshot snap;
    snap.ixp = ixp;
    snap.date = p.days[day];
    auto emit = [&](std::uint32_t prefix, const std::vector<Asn>& path) {
      snap.entries.push_back({p.prefixes[prefix], path, path.back(), path.front()});
    };
    for (const auto& t : p.tracks) {
      if (t.ixp == ixp) p.for_each_row(t, day, emit);
    }
    p.for_each_background_row(emit);
    s.snapshots.push_back(std::move(snap));
  }
  return s;
}

std::vector<Asn> Scenario::targets(std::size_t index, const std::string& ixp) const {
  auto it = plan_->targets.find({index, ixp});
  return it == plan_->targets.end() ? std::vector<Asn>{} : it->second;
}

GroundTruth Scenario::ground_truth() const {
  const auto& p = *plan_;
  GroundTruth g;
  g.window = p.spec.window;
  g.confirmation_window = p.spec.confirmation_window;
  for (const auto& x : p.spec.ixps) {
    g.gaps[x.id] = std::vector<Date>(x.missing_days.begin(), x.missing_days.end());
    std::sort(g.gaps[x.id].begin(), g.gaps[x.id].end());
    g.gaps[x.id].erase(std::unique(g.gaps[x.id].begin(), g.gaps[x.id].end()), g.gaps[x.id].end());
  }

  const std::size_t ndays = p.days.size();
  const std::size_t last = ndays - 1;
  for (const auto& t : p.tracks) {
    const TrackKey key{t.ixp, t.country};
    const auto& locals = p.local_neighbors.at(t.country);
    std::vector<std::vector<char>> present(t.origins.size(), std::vector<char>(ndays, 0));
    auto& points = g.metrics[key];

    std::vector<std::uint32_t> prefixes;
    std::set<Asn> neighbors;
    for (std::size_t day = 0; day < ndays; ++day) {
      if (p.is_missing(t.ixp, day)) continue;
      DailyMetrics m;
      m.ixp = t.ixp;
      m.date = p.days[day];
      m.country = t.country;
      prefixes.clear();
      neighbors.clear();
      for (std::uint32_t i = 0; i < t.anns.size(); ++i) {
        if (!t.active(day, i)) continue;
        const auto& a = t.anns[i];
        ++m.announcements;
        present[a.slot][day] = 1;
        prefixes.push_back(a.prefix);
        const bool local = std::find(locals.begin(), locals.end(), a.neighbor) != locals.end();
        if (local && !t.is_disconnected(day, a.neighbor)) neighbors.insert(a.neighbor);
      }
      for (const auto& row : present) m.distinct_origins += row[day];
      std::sort(prefixes.begin(), prefixes.end());
      m.distinct_prefixes = static_cast<std::uint64_t>(std::unique(prefixes.begin(), prefixes.end()) - prefixes.begin());
      m.distinct_neighbors = neighbors.size();
      points.push_back(m);
    }

    auto& lost = g.unreachable[key];
    auto& fresh = g.new_origins[key];
    auto& offline = g.offline_days[key];
    const auto w = static_cast<std::size_t>(p.spec.confirmation_window);
    for (std::size_t s = 0; s < t.origins.size(); ++s) {
      std::size_t seen = 0, snapshots = 0;
      for (std::size_t day = 0; day < ndays; ++day) {
        if (p.is_missing(t.ixp, day)) continue;
        ++snapshots;
        seen += present[s][day];
      }
      if (seen > 0) offline[t.origins[s]] = snapshots - seen;

      if (present[s][0]) {
        bool gone = !present[s][last];
        for (std::size_t k = 1; k <= w && k <= last && gone; ++k) gone = !present[s][last - k];
        if (gone) lost.push_back(t.origins[s]);
      } else if (present[s][last]) {
        fresh.push_back(t.origins[s]);
      }
    }
    std::sort(lost.begin(), lost.end());
    std::sort(fresh.begin(), fresh.end());

    auto spans = t.outages;
    std::sort(spans.begin(), spans.end(), [](const DateRange& x, const DateRange& y) { return x.first < y.first; });
    g.outages[key] = spans;
  }
  return g;
}

GroundTruth generate(const ScenarioSpec& spec, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  Scenario scenario(spec);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create '" + out.string() + "': " + ec.message());

  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw DataError("failed writing '" + path.string() + "'");
  };

  for (const auto& x : spec.ixps) {
    const fs::path dir = out / x.id;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + dir.string() + "': " + ec.message());
    for (Date d : scenario.snapshot_dates(x.id)) write(dir / (format_date(d) + ".csv"), scenario.snapshot_csv(x.id, d));
  }
  write(out / "delegated.txt", scenario.delegated_text());

  auto truth = scenario.ground_truth();
  std::ostringstream gt;
  write_ground_truth(gt, truth);
  write(out / "ground_truth.txt", gt.str());
  std::ostringstream sc;
  write_scenario(sc, spec);
  write(out / "scenario.json", sc.str());
  return truth;
}

// ---------------------------------------------------------------------------
// Ground truth files

void write_ground_truth(std::ostream& out, const GroundTruth& g) {
  out << "# ixpscope ground truth v1\n";
  out << "window|" << format_date(g.window.first) << '|' << format_date(g.window.last) << '\n';
  out << "confirmation_window|" << g.confirmation_window << '\n';
  for (const auto& [ixp, dates] : g.gaps) {
    out << "gaps|" << ixp << '|';
    for (std::size_t i = 0; i < dates.size(); ++i) out << (i ? " " : "") << format_date(dates[i]);
    out << '\n';
  }
  out << "[metrics]\n";
  std::vector<MetricSeries> series;
  for (const auto& [key, points] : g.metrics) series.push_back({key.ixp, key.country, points, {}});
  write_metrics_csv(out, series);
  out << "[unreachable]\n";
  for (const auto& [key, asns] : g.unreachable) out << key.ixp << '|' << key.country.str() << '|' << join_asns(asns) << '\n';
  out << "[new]\n";
  for (const auto& [key, asns] : g.new_origins) out << key.ixp << '|' << key.country.str() << '|' << join_asns(asns) << '\n';
  out << "[offline]\n";
  for (const auto& [key, m] : g.offline_days) {
    for (const auto& [asn, n] : m) out << key.ixp << '|' << key.country.str() << '|' << asn << '|' << n << '\n';
  }
  out << "[outages]\n";
  for (const auto& [key, spans] : g.outages) {
    for (const auto& s : spans) {
      out << key.ixp << '|' << key.country.str() << "|announcements|" << format_date(s.first) << '|'
          << format_date(s.last) << '\n';
    }
  }
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth g;
  std::string raw, section;
  std::string metrics_text;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw DataError("ground truth line " + std::to_string(line_no) + ": " + why);
  };
  auto key_of = [&](std::string_view ixp, std::string_view cc) {
    auto c = CountryCode::parse(cc);
    if (!c) fail("bad country");
    return TrackKey{std::string(ixp), *c};
  };
  auto asns_of = [&](std::string_view text) {
    std::vector<Asn> v;
    for (auto tok : split(text, ' ')) {
      if (tok.empty()) continue;
      auto a = parse_asn(tok);
      if (!a) fail("bad ASN");
      v.push_back(*a);
    }
    return v;
  };
  auto date_of = [&](std::string_view text) {
    auto d = parse_date(text);
    if (!d) fail("bad date");
    return *d;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      section = std::string(line);
      continue;
    }
    if (section == "[metrics]") {
      metrics_text.append(line).append("\n");
      continue;
    }
    auto f = split(line, '|');
    if (section.empty()) {
      if (f[0] == "window" && f.size() == 3) {
        g.window = {date_of(f[1]), date_of(f[2])};
      } else if (f[0] == "confirmation_window" && f.size() == 2) {
        g.confirmation_window = std::stoi(std::string(f[1]));
      } else if (f[0] == "gaps" && f.size() == 3) {
        auto& v = g.gaps[std::string(f[1])];
        for (auto tok : split(f[2], ' ')) {
          if (!tok.empty()) v.push_back(date_of(tok));
        }
      } else {
        fail("unknown header line");
      }
    } else if (section == "[unreachable]" || section == "[new]") {
      if (f.size() != 3) fail("expected ixp|country|asns");
      auto& target = section == "[new]" ? g.new_origins : g.unreachable;
      target[key_of(f[0], f[1])] = asns_of(f[2]);
    } else if (section == "[offline]") {
      if (f.size() != 4) fail("expected ixp|country|asn|days");
      auto a = parse_asn(f[2]);
      if (!a) fail("bad ASN");
      g.offline_days[key_of(f[0], f[1])][*a] = std::stoull(std::string(f[3]));
    } else if (section == "[outages]") {
      if (f.size() != 5) fail("expected ixp|country|metric|start|end");
      g.outages[key_of(f[0], f[1])].push_back({date_of(f[3]), date_of(f[4])});
    } else {
      fail("line outside a known section");
    }
  }
  std::istringstream ms(metrics_text);
  for (auto& m : read_metrics_csv(ms)) {
    auto& v = g.metrics[TrackKey{m.ixp, m.country}];
    v.push_back(std::move(m));
  }
  // Tracks with no rows in a section still exist.
  for (const auto& [key, _] : g.metrics) {
    g.unreachable[key];
    g.new_origins[key];
    g.offline_days[key];
    g.outages[key];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Verification

std::vector<Discrepancy> verify(const GroundTruth& truth, const std::map<TrackKey, TrackOutputs>& outputs) {
  std::vector<Discrepancy> out;
  auto track_name = [](const TrackKey& k) { return k.ixp + "/" + k.country.str(); };
  auto add = [&](std::string cat, std::string key, std::string exp, std::string act) {
    out.push_back({std::move(cat), std::move(key), std::move(exp), std::move(act)});
  };
  auto dates_text = [](const std::vector<Date>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_date(v[i]);
    return s;
  };

  for (const auto& [key, outs] : outputs) {
    if (!truth.metrics.contains(key)) add("tracks", track_name(key), "absent", "present");
  }
  for (const auto& [key, expected] : truth.metrics) {
    const auto name = track_name(key);
    auto it = outputs.find(key);
    if (it == outputs.end()) {
      add("tracks", name, "present", "absent");
      continue;
    }
    const auto& o = it->second;

    // Metric points, matched by date.
    std::map<Date, const DailyMetrics*> actual;
    for (const auto& p : o.series.points) actual[p.date] = &p;
    for (const auto& e : expected) {
      auto a = actual.find(e.date);
      if (a == actual.end()) {
        add("metrics", name + " " + format_date(e.date), "point", "missing");
        continue;
      }
      for (auto m : kAllMetrics) {
        if (e.value(m) != a->second->value(m)) {
          add("metrics", name + " " + format_date(e.date) + " " + std::string(metric_name(m)),
              std::to_string(e.value(m)), std::to_string(a->second->value(m)));
        }
      }
      actual.erase(a);
    }
    for (const auto& [d, _] : actual) add("metrics", name + " " + format_date(d), "no point", "point");

    auto g = truth.gaps.find(key.ixp);
    const std::vector<Date> expected_gaps = g == truth.gaps.end() ? std::vector<Date>{} : g->second;
    if (expected_gaps != o.series.gaps) add("gaps", name, dates_text(expected_gaps), dates_text(o.series.gaps));

    auto set_check = [&](const char* cat, const std::map<TrackKey, std::vector<Asn>>& m, const std::vector<Asn>& act) {
      auto e = m.find(key);
      const std::vector<Asn> exp = e == m.end() ? std::vector<Asn>{} : e->second;
      if (exp != act) add(cat, name, join_asns(exp), join_asns(act));
    };
    set_check("unreachable", truth.unreachable, o.report.lost_asns);
    set_check("new", truth.new_origins, o.report.new_asns);

    auto off = truth.offline_days.find(key);
    const std::map<Asn, std::size_t> exp_off = off == truth.offline_days.end() ? std::map<Asn, std::size_t>{} : off->second;
    for (const auto& [asn, days] : exp_off) {
      if (!o.origins.presence.contains(asn)) {
        add("offline", name + " AS" + std::to_string(asn), std::to_string(days), "never seen");
        continue;
      }
      const auto got = offline_days(o.origins, asn, truth.window);
      if (got != days) add("offline", name + " AS" + std::to_string(asn), std::to_string(days), std::to_string(got));
    }
    for (const auto& [asn, _] : o.origins.presence) {
      if (!exp_off.contains(asn)) add("offline", name + " AS" + std::to_string(asn), "never seen", "seen");
    }

    auto sp = truth.outages.find(key);
    const std::vector<DateRange> exp_spans = sp == truth.outages.end() ? std::vector<DateRange>{} : sp->second;
    std::vector<DateRange> got_spans;
    for (const auto& e : o.events) {
      if (e.metric == Metric::announcements) got_spans.push_back({e.start, e.end});
    }
    if (exp_spans != got_spans) {
      auto text = [](const std::vector<DateRange>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
          s += (i ? " " : "") + format_date(v[i].first) + ".." + format_date(v[i].last);
        }
        return s;
      };
      add("outages", name, text(exp_spans), text(got_spans));
    }
  }
  return out;
}

}  // namespace ixpscope
