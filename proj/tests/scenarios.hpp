// Randomized scenario specs for oracle tests.
//
// Outages are kept detectable at default detector settings: 1 to 4 days
// long, at least 10% deep, at least 7 days into the window and at least 12
// days apart on any one track, so the trailing median never sees another
// outage. Slow effects (permanent loss, joins, flaps) stay well below the
// 5% threshold per week.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ixpscope/synth.hpp"

namespace testing {

struct RandomScenarioOptions {
  std::uint32_t max_origins_per_country = 1000;
  std::uint32_t min_origins_per_country = 200;
  int outages = 5;
};

inline ixpscope::ScenarioSpec random_spec(std::uint64_t seed, const RandomScenarioOptions& opt = {}) {
  using namespace ixpscope;
  std::mt19937_64 rng(seed);
  auto uniform = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  auto real = [&](double lo, double hi) {
    return std::round(std::uniform_real_distribution<double>(lo, hi)(rng) * 100.0) / 100.0;
  };

  ScenarioSpec spec;
  spec.seed = seed;
  const Date first = date_from_string("2022-02-19");
  spec.window = {first, first + std::chrono::days{69}};
  auto day = [&](long i) { return first + std::chrono::days{i}; };
  const std::vector<std::string> ids{"amsix", "linx", "six", "auix", "spoixbr"};
  const std::vector<CountryCode> ccs{country("UA"), country("RU")};

  for (auto cc : ccs) {
    CountryProfile p;
    p.origin_count = static_cast<std::uint32_t>(uniform(opt.min_origins_per_country, opt.max_origins_per_country));
    p.min_prefixes = 1;
    p.max_prefixes = static_cast<std::uint32_t>(uniform(1, 3));
    p.neighbor_count = static_cast<std::uint32_t>(uniform(3, 25));
    p.local_share = real(0.4, 0.9);
    p.multipath = real(0.0, 0.2);
    spec.countries[cc] = p;
  }
  for (const auto& id : ids) {
    IxpProfile x;
    x.id = id;
    for (auto cc : ccs) x.visibility[cc] = real(0.3, 1.0);
    std::set<long> missing;
    const long n = uniform(0, 2);
    while (static_cast<long>(missing.size()) < n) missing.insert(uniform(1, 68));
    for (long m : missing) x.missing_days.push_back(day(m));
    spec.ixps.push_back(x);
  }

  for (auto cc : ccs) {
    Disruption loss;
    loss.kind = DisruptionKind::permanent_loss;
    loss.country = cc;
    const long start = uniform(1, 20);
    loss.dates = {day(start), day(std::min<long>(68, start + uniform(40, 47)))};
    loss.fraction = real(0.02, 0.15);
    spec.disruptions.push_back(loss);

    Disruption join;
    join.kind = DisruptionKind::join;
    join.ixp = uniform(0, 1) ? "*" : ids[static_cast<std::size_t>(uniform(0, 4))];
    join.country = cc;
    join.dates.first = join.dates.last = day(uniform(10, 60));
    join.count = static_cast<std::uint32_t>(uniform(1, 3));
    spec.disruptions.push_back(join);

    Disruption flap;
    flap.kind = DisruptionKind::origin_removal;
    flap.ixp = ids[static_cast<std::size_t>(uniform(0, 4))];
    flap.country = cc;
    const long fs = uniform(50, 68);
    flap.dates = {day(fs), day(std::min<long>(69, fs + uniform(0, 1)))};
    flap.count = static_cast<std::uint32_t>(uniform(1, 3));
    spec.disruptions.push_back(flap);

    Disruption dis;
    dis.kind = DisruptionKind::neighbor_disconnect;
    dis.ixp = ids[static_cast<std::size_t>(uniform(0, 4))];
    dis.country = cc;
    const long ds = uniform(1, 60);
    dis.dates = {day(ds), day(std::min<long>(69, ds + uniform(0, 20)))};
    dis.count = static_cast<std::uint32_t>(uniform(1, 2));
    spec.disruptions.push_back(dis);
  }

  // Outages, spaced per track.
  std::map<std::pair<std::string, CountryCode>, std::vector<std::pair<long, long>>> busy;
  int placed = 0;
  for (int attempt = 0; attempt < 200 && placed < opt.outages; ++attempt) {
    Disruption d;
    d.kind = uniform(0, 1) ? DisruptionKind::prefix_shrink : DisruptionKind::origin_removal;
    d.ixp = uniform(0, 3) == 0 ? "*" : ids[static_cast<std::size_t>(uniform(0, 4))];
    d.country = ccs[static_cast<std::size_t>(uniform(0, 1))];
    const long s = uniform(7, 65);
    const long e = std::min<long>(68, s + uniform(0, 3));
    d.dates = {day(s), day(e)};
    d.fraction = real(0.10, 0.40);
    std::vector<std::string> hit = d.ixp == "*" ? ids : std::vector<std::string>{d.ixp};
    bool clash = false;
    for (const auto& ixp : hit) {
      for (auto [a, b] : busy[{ixp, d.country}]) clash = clash || !(e + 12 < a || b + 12 < s);
    }
    if (clash) continue;
    for (const auto& ixp : hit) busy[{ixp, d.country}].emplace_back(s, e);
    spec.disruptions.push_back(d);
    ++placed;
  }
  return spec;
}

}  // namespace testing

namespace testing {

/// Runs the analysis over a generated tree exactly as the CLI would: the
/// database comes from the emitted delegated file, snapshots from disk.
inline std::map<ixpscope::TrackKey, ixpscope::TrackOutputs> analyze_tree(const std::filesystem::path& dir,
                                                                         const ixpscope::ScenarioSpec& spec) {
  using namespace ixpscope;
  std::vector<DelegatedParse> parsed{parse_delegated_file(dir / "delegated.txt", Registry::ripencc)};
  const AsnDb db = merge(std::span<const DelegatedParse>(parsed));
  AnalysisParams params;
  params.baseline = spec.window.first;
  params.final_date = spec.window.last;
  params.confirmation_window = spec.confirmation_window;
  std::map<TrackKey, TrackOutputs> out;
  for (const auto& x : spec.ixps) {
    const auto series = load_series(dir, x.id, spec.window);
    for (const auto& [cc, _] : spec.countries) out[{x.id, cc}] = analyze_track(series, db, cc, params);
  }
  return out;
}

}  // namespace testing
