#include <sstream>

#include "doctest.h"
#include "ixpscope/synth.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace ixpscope;

namespace {

const Date kStart = date_from_string("2022-02-19");

Date day(int i) { return kStart + std::chrono::days{i}; }

ScenarioSpec small_spec(int days, std::uint32_t origins) {
  ScenarioSpec s;
  s.seed = 42;
  s.window = {kStart, day(days - 1)};
  s.ixps.push_back({"amsix", {}, {}});
  CountryProfile p;
  p.origin_count = origins;
  p.neighbor_count = 2;
  s.countries[country("UA")] = p;
  s.background_origins = 5;
  return s;
}

Disruption disruption(DisruptionKind k, const char* ixp, int first, int last, std::uint32_t count, double fraction) {
  Disruption d;
  d.kind = k;
  d.ixp = ixp;
  d.country = country("UA");
  d.dates = {day(first), day(last)};
  d.count = count;
  d.fraction = fraction;
  return d;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("validation") {
    auto ok = small_spec(10, 5);
    CHECK_NOTHROW(ok.validate());
    auto check_bad = [](ScenarioSpec s) { CHECK_THROWS_AS(s.validate(), std::invalid_argument); };
    auto s = ok;
    s.window = {day(5), day(1)};
    check_bad(s);
    s = ok;
    s.ixps.push_back({"amsix", {}, {}});
    check_bad(s);
    s = ok;
    s.ixps[0].id = "../etc";
    check_bad(s);
    s = ok;
    s.ixps[0].missing_days = {day(0)};
    check_bad(s);
    s = ok;
    s.ixps[0].missing_days = {day(30)};
    check_bad(s);
    s = ok;
    s.countries[CountryCode::placeholder()] = s.countries.begin()->second;
    check_bad(s);
    s = ok;
    s.disruptions.push_back(disruption(DisruptionKind::prefix_shrink, "amsix", 2, 3, 1, 0.2));
    check_bad(s);  // both count and fraction
    s = ok;
    s.disruptions.push_back(disruption(DisruptionKind::prefix_shrink, "linx", 2, 3, 0, 0.2));
    check_bad(s);
    s = ok;
    s.disruptions.push_back(disruption(DisruptionKind::prefix_shrink, "*", 2, 30, 0, 0.2));
    check_bad(s);
    s = ok;
    s.disruptions.push_back(disruption(DisruptionKind::permanent_loss, "*", 0, 3, 1, 0));
    check_bad(s);
    s = ok;
    s.disruptions.push_back(disruption(DisruptionKind::join, "*", 2, 3, 0, 0.5));
    check_bad(s);
  }

  TEST_CASE("scenario JSON round-trips") {
    auto s = testing::random_spec(5);
    std::ostringstream out;
    write_scenario(out, s);
    std::istringstream in(out.str());
    CHECK(read_scenario(in) == s);
    std::istringstream broken("{\"seed\": 1}");
    CHECK_THROWS_AS(read_scenario(broken), DataError);
    std::istringstream bad_kind(
        R"({"seed":1,"window":{"start":"2022-02-19","end":"2022-02-28"},"ixps":["amsix"],)"
        R"("countries":{"UA":{"origin_count":5}},"disruptions":[{"kind":"meteor","country":"UA","start":"2022-02-20","count":1}]})");
    CHECK_THROWS_AS(read_scenario(bad_kind), DataError);
  }

  TEST_CASE("no disruptions: every day has all origins") {
    auto spec = small_spec(10, 5);
    testing::TempDir dir;
    auto truth = generate(spec, dir.path());
    const TrackKey key{"amsix", country("UA")};
    REQUIRE(truth.metrics.at(key).size() == 10);
    for (const auto& m : truth.metrics.at(key)) CHECK(m.distinct_origins == 5);

    auto outputs = testing::analyze_tree(dir.path(), spec);
    for (const auto& m : outputs.at(key).series.points) CHECK(m.distinct_origins == 5);
    CHECK(verify(truth, outputs).empty());
  }

  TEST_CASE("permanent loss of 87 of 1016 origins") {
    auto spec = small_spec(30, 1016);
    spec.disruptions.push_back(disruption(DisruptionKind::permanent_loss, "*", 3, 20, 87, 0));
    testing::TempDir dir;
    auto truth = generate(spec, dir.path());
    auto outputs = testing::analyze_tree(dir.path(), spec);
    const auto& r = outputs.at({"amsix", country("UA")}).report;
    CHECK(r.total_baseline == 1016);
    CHECK(r.lost == 87);
    CHECK(r.pct_lost->str() == "8.5");
    Scenario sc(spec);
    CHECK(sc.targets(0, "amsix") == r.lost_asns);
    CHECK(verify(truth, outputs).empty());
  }

  TEST_CASE("same seed, same bytes") {
    auto spec = testing::random_spec(9, {300, 100, 3});
    testing::TempDir a, b;
    generate(spec, a.path());
    generate(spec, b.path());
    CHECK(testing::tree_contents(a.path()) == testing::tree_contents(b.path()));
    auto other = spec;
    other.seed += 1;
    testing::TempDir c;
    generate(other, c.path());
    CHECK(testing::tree_contents(a.path()) != testing::tree_contents(c.path()));
  }

  TEST_CASE("emitted files are clean inputs and match the in-memory series") {
    auto spec = testing::random_spec(3, {300, 100, 3});
    testing::TempDir dir;
    generate(spec, dir.path());
    Scenario sc(spec);
    std::vector<DelegatedParse> parsed{parse_delegated_file(dir / "delegated.txt", Registry::ripencc)};
    CHECK(parsed[0].skipped.empty());
    const auto db = merge(std::span<const DelegatedParse>(parsed));
    CHECK(db == sc.asndb());
    for (const auto& x : spec.ixps) {
      auto disk = load_series(dir.path(), x.id, spec.window);
      auto mem = sc.series(x.id);
      CHECK(disk.gaps == mem.gaps);
      REQUIRE(disk.snapshots.size() == mem.snapshots.size());
      for (std::size_t i = 0; i < disk.snapshots.size(); ++i) {
        CHECK(disk.snapshots[i].skipped == 0);
        CHECK(disk.snapshots[i].entries == mem.snapshots[i].entries);
      }
      for (const auto& [cc, _] : spec.countries) {
        CHECK(build_series(disk, db, cc).points == sc.ground_truth().metrics.at({x.id, cc}));
      }
    }
  }

  TEST_CASE("ground truth file round-trips") {
    auto spec = testing::random_spec(4, {300, 100, 3});
    auto truth = Scenario(spec).ground_truth();
    std::ostringstream out;
    write_ground_truth(out, truth);
    std::istringstream in(out.str());
    CHECK(read_ground_truth(in) == truth);
    std::istringstream bad("# ixpscope ground truth v1\n[outages]\namsix|UA|x\n");
    CHECK_THROWS_AS(read_ground_truth(bad), DataError);
  }

  TEST_CASE("verify is sensitive to a single edit") {
    auto spec = testing::random_spec(6, {300, 100, 3});
    testing::TempDir dir;
    auto truth = generate(spec, dir.path());
    auto outputs = testing::analyze_tree(dir.path(), spec);
    REQUIRE(verify(truth, outputs).empty());

    auto edited = truth;
    edited.metrics.begin()->second[5].distinct_prefixes += 1;
    auto diffs = verify(edited, outputs);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].category == "metrics");

    edited = truth;
    edited.unreachable.begin()->second.push_back(1);
    diffs = verify(edited, outputs);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].category == "unreachable");

    edited = truth;
    edited.outages.begin()->second.push_back({day(60), day(61)});
    diffs = verify(edited, outputs);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].category == "outages");

    auto fewer = outputs;
    fewer.erase(fewer.begin());
    diffs = verify(truth, fewer);
    REQUIRE(diffs.size() == 1);
    CHECK(diffs[0].category == "tracks");
  }

  TEST_CASE("five injected outages are found at their dates") {
    auto spec = small_spec(70, 400);
    spec.ixps[0].missing_days = {day(33)};
    spec.disruptions = {
        disruption(DisruptionKind::prefix_shrink, "amsix", 8, 8, 0, 0.07),
        disruption(DisruptionKind::origin_removal, "amsix", 20, 22, 0, 0.25),
        disruption(DisruptionKind::prefix_shrink, "amsix", 32, 35, 0, 0.4),
        disruption(DisruptionKind::origin_removal, "*", 48, 49, 0, 0.1),
        disruption(DisruptionKind::prefix_shrink, "amsix", 62, 62, 0, 0.15),
    };
    testing::TempDir dir;
    auto truth = generate(spec, dir.path());
    auto outputs = testing::analyze_tree(dir.path(), spec);
    CHECK(verify(truth, outputs).empty());
    std::vector<DateRange> found;
    for (const auto& e : outputs.at({"amsix", country("UA")}).events) {
      if (e.metric == Metric::announcements) found.push_back({e.start, e.end});
    }
    CHECK(found == std::vector<DateRange>{{day(8), day(8)}, {day(20), day(22)}, {day(32), day(35)},
                                          {day(48), day(49)}, {day(62), day(62)}});
  }

  TEST_CASE("neighbor disconnect and join") {
    auto spec = small_spec(20, 60);
    spec.countries.begin()->second.neighbor_count = 4;
    spec.countries.begin()->second.local_share = 1.0;
    spec.disruptions = {disruption(DisruptionKind::neighbor_disconnect, "amsix", 5, 7, 1, 0),
                        disruption(DisruptionKind::join, "amsix", 10, 10, 2, 0)};
    Scenario sc(spec);
    auto truth = sc.ground_truth();
    const auto& m = truth.metrics.at({"amsix", country("UA")});
    CHECK(m[4].distinct_neighbors == 4);
    CHECK(m[5].distinct_neighbors == 3);
    CHECK(m[7].distinct_neighbors == 3);
    CHECK(m[8].distinct_neighbors == 4);
    CHECK(m[5].announcements == m[4].announcements);  // routes move behind a foreign member
    CHECK(m[9].distinct_origins == 60);
    CHECK(m[10].distinct_origins == 62);
    CHECK(truth.new_origins.at({"amsix", country("UA")}) == sc.targets(1, "amsix"));
    const auto disconnected = sc.targets(0, "amsix");
    REQUIRE(disconnected.size() == 1);
    testing::TempDir dir;
    generate(spec, dir.path());
    auto outputs = testing::analyze_tree(dir.path(), spec);
    CHECK(verify(truth, outputs).empty());
    const auto& days = outputs.at({"amsix", country("UA")}).neighbors.presence.at(disconnected[0]);
    CHECK_FALSE(days.contains(day(6)));
    CHECK(days.contains(day(8)));
  }

  TEST_CASE("impossible disruptions are reported") {
    auto spec = small_spec(10, 5);
    spec.disruptions = {disruption(DisruptionKind::permanent_loss, "*", 2, 3, 6, 0)};
    CHECK_THROWS_AS(Scenario{spec}, std::invalid_argument);
  }

  TEST_CASE("unwritable output") {
    testing::TempDir dir;
    testing::spit(dir / "file", "x");
    CHECK_THROWS_AS(generate(small_spec(10, 5), dir / "file/sub"), DataError);
  }
}
