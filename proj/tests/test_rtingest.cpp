#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "ixpscope/rtingest.hpp"
#include "support.hpp"

using namespace ixpscope;

namespace {

const Date kDay = date_from_string("2022-02-19");

Snapshot parse(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return parse_snapshot(in, schema, "amsix", kDay);
}

}  // namespace

TEST_SUITE("rtingest") {
  TEST_CASE("endpoints come from the path") {
    auto s = parse("prefix,as_path\n192.0.2.0/24,174 3216 25133\n");
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].origin == 25133);
    CHECK(s.entries[0].neighbor == 174);
    CHECK(s.entries[0].prefix == "192.0.2.0/24");
    CHECK(s.entries[0].as_path == std::vector<Asn>{174, 3216, 25133});
  }

  TEST_CASE("prepending keeps endpoints") {
    auto s = parse("prefix,as_path\n192.0.2.0/24,6939 6939 6939 12389\n10.0.0.0/8,64500\n");
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].origin == 12389);
    CHECK(s.entries[0].neighbor == 6939);
    CHECK(s.entries[1].origin == 64500);
    CHECK(s.entries[1].neighbor == 64500);
  }

  TEST_CASE("AS_SET fixture") {
    std::ifstream in(testing::fixture("snapshots/as_set.csv"));
    auto s = parse_snapshot(in, {}, "linx", kDay);
    // Hand count: rows 1, 3, 6, 8 and 9 are plain paths; 2, 4, 5, 7 and 10 carry sets.
    CHECK(s.entries.size() == 5);
    CHECK(s.skipped == 5);
    std::vector<std::size_t> lines;
    for (const auto& i : s.issues) {
      CHECK(i.defect == RowDefect::as_set);
      lines.push_back(i.line);
    }
    CHECK(lines == std::vector<std::size_t>{3, 5, 6, 8, 11});
    CHECK(s.entries[2].prefix == "2001:db8::/32");
    CHECK(s.entries[3] == s.entries[4]);  // duplicates are separate announcements
  }

  TEST_CASE("row defects are classified") {
    const std::string text =
        "prefix,as_path\n"
        "10.0.0.0/8,\n"
        "10.0.0.0/8,174 x1\n"
        "10.0.0.0/8,174 {1}\n"
        "not-a-prefix,174\n"
        "10.0.0.0/33,174\n"
        "10.0.0.0/8,174,extra\n"
        "\"10.0.0.0/8,174\n"
        "\n"
        "10.0.0.0/8,174 0\n";
    auto s = parse(text);
    CHECK(s.entries.empty());
    REQUIRE(s.issues.size() == 8);
    CHECK(s.issues[0].defect == RowDefect::empty_path);
    CHECK(s.issues[1].defect == RowDefect::bad_asn_token);
    CHECK(s.issues[2].defect == RowDefect::as_set);
    CHECK(s.issues[3].defect == RowDefect::bad_prefix);
    CHECK(s.issues[4].defect == RowDefect::bad_prefix);
    CHECK(s.issues[5].defect == RowDefect::field_count);
    CHECK(s.issues[6].defect == RowDefect::bad_quoting);
    CHECK(s.issues[7].defect == RowDefect::bad_asn_token);
    CHECK(s.issues[7].line == 10);
  }

  TEST_CASE("prefixes are canonicalized") {
    CHECK(normalize_prefix("192.0.2.77/24") == "192.0.2.0/24");
    CHECK(normalize_prefix("2001:DB8:0:0::1/32") == "2001:db8::/32");
    CHECK(normalize_prefix("0.0.0.0/0") == "0.0.0.0/0");
    CHECK_FALSE(normalize_prefix("192.0.2.0"));
    CHECK_FALSE(normalize_prefix("192.0.2.0/"));
    CHECK_FALSE(normalize_prefix("2001:db8::/129"));
    CHECK_FALSE(normalize_prefix("256.0.0.0/8"));
  }

  TEST_CASE("schema mapping and endpoint columns") {
    std::istringstream cfg("# looking glass export\nprefix = network\nas_path = path\norigin = origin_as\n");
    auto schema = read_schema(cfg);
    CHECK(schema.prefix_column == "network");
    CHECK(schema.origin_column == std::string("origin_as"));
    auto s = parse(
        "next_hop,network,med,path,origin_as\n"
        "192.0.2.1,192.0.2.0/24,0,174 25133,25133\n"
        "192.0.2.1,198.51.100.0/24,0,174 25133,3356\n",
        schema);
    REQUIRE(s.entries.size() == 1);
    REQUIRE(s.issues.size() == 1);
    CHECK(s.issues[0].defect == RowDefect::endpoint_mismatch);

    CHECK_THROWS_AS(parse("prefix,path\n10.0.0.0/8,1\n"), DataError);  // default as_path column missing
    CHECK_THROWS_AS(parse(""), DataError);
    std::istringstream bad("prefix\n");
    CHECK_THROWS_AS(read_schema(bad), DataError);
  }

  TEST_CASE("normalize_path") {
    CHECK(normalize_path(std::vector<Asn>{6939, 6939, 6939, 12389}) == std::vector<Asn>{6939, 12389});
    CHECK(normalize_path(std::vector<Asn>{174, 3216, 25133}) == std::vector<Asn>{174, 3216, 25133});
    CHECK(normalize_path(std::vector<Asn>{1, 2, 2, 1}) == std::vector<Asn>{1, 2, 1});
    CHECK_THROWS_AS(normalize_path(std::vector<Asn>{}), std::invalid_argument);
  }

  TEST_CASE("load_series counts gaps") {
    testing::TempDir dir;
    std::filesystem::create_directories(dir / "amsix");
    const DateRange window{kDay, kDay + std::chrono::days{69}};
    const auto days = window.dates();
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (i == 10 || i == 40) continue;
      testing::spit(dir / ("amsix/" + format_date(days[i]) + ".csv"), "prefix,as_path\n10.0.0.0/8,174 25133\n");
    }
    testing::spit(dir / "amsix/2022-05-01.csv", "prefix,as_path\n");  // outside the window
    auto s = load_series(dir.path(), "amsix", window);
    CHECK(s.snapshots.size() == 68);
    CHECK(s.gaps == std::vector<Date>{days[10], days[40]});
    CHECK(s.at(days[10]) == nullptr);
    REQUIRE(s.at(days[11]) != nullptr);
    CHECK(s.at(days[11])->date == days[11]);
    CHECK(s.dates().size() == 68);

    auto empty = load_series(dir.path(), "linx", window);
    CHECK(empty.snapshots.empty());
    CHECK(empty.gaps.size() == 70);
    CHECK_THROWS_AS(load_series(dir / "nope", "amsix", window), DataError);
  }

  TEST_CASE("unreadable file becomes a gap with a warning") {
    if (geteuid() == 0) return;  // root reads anything
    testing::TempDir dir;
    std::filesystem::create_directories(dir / "six");
    const auto file = dir / "six/2022-02-19.csv";
    testing::spit(file, "prefix,as_path\n");
    std::filesystem::permissions(file, std::filesystem::perms::none);
    auto s = load_series(dir.path(), "six", {kDay, kDay});
    CHECK(s.snapshots.empty());
    CHECK(s.warnings.size() == 1);
  }

  TEST_CASE("attribute_country") {
    std::vector<std::vector<AsnRecord>> in{{AsnRecord{25133, country("UA"), Registry::ripencc, {}, {}},
                                            AsnRecord{31133, country("RU"), Registry::ripencc, {}, {}}}};
    auto db = merge(std::span<const std::vector<AsnRecord>>(in));
    RouteEntry e{"10.0.0.0/8", {174, 25133}, 25133, 174};
    CHECK(attribute_country(e, db) == country("UA"));
    e.origin = 31133;
    CHECK(attribute_country(e, db) == country("RU"));
    e.origin = 174;
    CHECK_FALSE(attribute_country(e, db));
  }
}
