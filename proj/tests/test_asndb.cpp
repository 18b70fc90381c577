#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ixpscope/asndb.hpp"
#include "support.hpp"

using namespace ixpscope;

namespace {

DelegatedParse parse_text(const std::string& text, Registry r) {
  std::istringstream in(text);
  return parse_delegated(in, r);
}

AsnRecord rec(Asn asn, const char* cc, Registry r, const char* date) {
  AsnRecord a;
  a.asn = asn;
  a.country = country(cc);
  a.registry = r;
  if (date) a.date = date_from_string(date);
  return a;
}

std::string persisted(const AsnDb& db) {
  std::ostringstream out;
  write_asndb(out, db);
  return out.str();
}

std::vector<DelegatedParse> fixture_inputs() {
  std::vector<DelegatedParse> v;
  for (auto r : {Registry::afrinic, Registry::apnic, Registry::arin, Registry::lacnic, Registry::ripencc}) {
    v.push_back(parse_delegated_file(testing::fixture("delegated/" + std::string(registry_name(r)) + ".txt"), r));
  }
  return v;
}

}  // namespace

TEST_SUITE("asndb") {
  TEST_CASE("registry names") {
    CHECK(registry_name(Registry::ripencc) == "ripencc");
    CHECK(registry_name(Registry::lacnic) == "lacnic");
    CHECK(parse_registry("arin") == Registry::arin);
    CHECK_FALSE(parse_registry("RIPE"));
  }

  TEST_CASE("single allocated row") {
    auto p = parse_text("ripencc|UA|asn|25133|1|20020701|allocated\n", Registry::ripencc);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].asn == 25133);
    CHECK(p.records[0].country == country("UA"));
    CHECK(p.records[0].registry == Registry::ripencc);
    CHECK(p.records[0].status == AllocationStatus::allocated);
    CHECK(p.records[0].date == date_from_string("2002-07-01"));
    CHECK(p.skipped.empty());
  }

  TEST_CASE("range expansion") {
    auto p = parse_text("arin|US|asn|100|5|19950101|assigned\n", Registry::arin);
    REQUIRE(p.records.size() == 5);
    for (Asn i = 0; i < 5; ++i) {
      CHECK(p.records[i].asn == 100 + i);
      CHECK(p.records[i].country == country("US"));
      CHECK(p.records[i].status == AllocationStatus::assigned);
    }
  }

  TEST_CASE("non-asn, summary, version, comment and unallocated rows are ignored") {
    const std::string text =
        "# comment\n"
        "2|apnic|20220301|3|19850101|20220228|+1000\n"
        "apnic|*|asn|*|3|summary\n"
        "apnic|AU|ipv4|1.0.0.0|256|20110811|allocated\n"
        "apnic|IN|asn|9498|1|20000101|reserved\n"
        "apnic||asn|9499|1||available\n"
        "\n";
    auto p = parse_text(text, Registry::apnic);
    CHECK(p.records.empty());
    CHECK(p.skipped.empty());
  }

  TEST_CASE("malformed rows are skipped with line numbers") {
    const std::string text =
        "ripencc|UA|asn|abc|1|20020701|allocated\n"
        "ripencc|UA|asn|1|0|20020701|allocated\n"
        "ripencc|UA|asn|1|1|2002071|allocated\n"
        "ripencc|Ukraine|asn|1|1|20020701|allocated\n"
        "ripencc|UA|asn|1|1|20020701\n"
        "ripencc|UA|asn|1|1|20020701|weird\n"
        "ripencc|UA|asn|4294967295|2|20020701|allocated\n"
        "ripencc|UA|asn|7|1|20020701|allocated\n";
    auto p = parse_text(text, Registry::ripencc);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].asn == 7);
    REQUIRE(p.skipped.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) CHECK(p.skipped[i].line == i + 1);
  }

  TEST_CASE("empty and zero dates are absent") {
    auto p = parse_text("ripencc|UA|asn|1|1||allocated\nripencc|UA|asn|2|1|00000000|allocated\n", Registry::ripencc);
    REQUIRE(p.records.size() == 2);
    CHECK_FALSE(p.records[0].date);
    CHECK_FALSE(p.records[1].date);
  }

  TEST_CASE("extended format with opaque id") {
    auto p = parse_text("ripencc|RU|asn|12389|1|20020101|allocated|2f9b6d1c\n", Registry::ripencc);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].country == country("RU"));
  }

  TEST_CASE("latest date wins") {
    std::vector<std::vector<AsnRecord>> in{{rec(65000, "UA", Registry::ripencc, "2001-01-01")},
                                           {rec(65000, "RU", Registry::ripencc, "2010-01-01")}};
    auto db = merge(std::span<const std::vector<AsnRecord>>(in));
    CHECK(db.lookup(65000) == country("RU"));
    CHECK(db.conflicts() == 1);
    CHECK(db.size() == 1);
  }

  TEST_CASE("missing date counts as earliest, then registry name decides") {
    std::vector<std::vector<AsnRecord>> in{{rec(1, "US", Registry::arin, nullptr)},
                                           {rec(1, "JP", Registry::apnic, "1990-01-01")},
                                           {rec(2, "US", Registry::arin, "2000-01-01")},
                                           {rec(2, "JP", Registry::apnic, "2000-01-01")}};
    auto db = merge(std::span<const std::vector<AsnRecord>>(in));
    CHECK(db.lookup(1) == country("JP"));
    CHECK(db.lookup(2) == country("JP"));
    CHECK(db.conflicts() == 2);
  }

  TEST_CASE("identity and disjoint union") {
    std::vector<std::vector<AsnRecord>> one{
        {rec(3, "UA", Registry::ripencc, "2001-01-01"), rec(1, "RU", Registry::ripencc, nullptr)}};
    auto db = merge(std::span<const std::vector<AsnRecord>>(one));
    CHECK(db.conflicts() == 0);
    REQUIRE(db.size() == 2);
    CHECK(db.records()[0].asn == 1);

    std::vector<std::vector<AsnRecord>> two{
        {rec(1, "UA", Registry::ripencc, nullptr), rec(2, "UA", Registry::ripencc, nullptr),
         rec(3, "UA", Registry::ripencc, nullptr)},
        {rec(10, "US", Registry::arin, nullptr), rec(11, "US", Registry::arin, nullptr),
         rec(12, "US", Registry::arin, nullptr), rec(13, "US", Registry::arin, nullptr)}};
    CHECK(merge(std::span<const std::vector<AsnRecord>>(two)).size() == 7);
  }

  TEST_CASE("lookup") {
    auto p = parse_text("ripencc|UA|asn|25133|1|20020701|allocated\nripencc|RU|asn|12389|1|20020101|allocated\n",
                        Registry::ripencc);
    std::vector<DelegatedParse> in{p};
    auto db = merge(std::span<const DelegatedParse>(in));
    CHECK(db.lookup(25133) == country("UA"));
    CHECK(db.lookup(12389) == country("RU"));
    CHECK_FALSE(db.lookup(31133));
    CHECK(db.find(31133) == nullptr);
  }

  TEST_CASE("fixture files") {
    auto inputs = fixture_inputs();
    std::size_t skipped = 0;
    for (const auto& p : inputs) skipped += p.skipped.size();
    CHECK(skipped == 5);
    auto db = merge(std::span<const DelegatedParse>(inputs));
    // afrinic 7 + apnic 6 + arin 5 new + lacnic 12 + ripencc 10 new; two duplicates.
    CHECK(db.size() == 40);
    CHECK(db.conflicts() == 2);
    CHECK(db.lookup(2500) == country("JP"));    // apnic 1995 beats arin 1990
    CHECK(db.lookup(327682) == country("ZA"));
    CHECK(db.find(327682)->registry == Registry::ripencc);  // 2015 beats 2010
    CHECK(db.lookup(327711) == country("EG"));
    CHECK_FALSE(db.lookup(327720));  // available
    CHECK_FALSE(db.lookup(9498));    // reserved
    CHECK(db.sources().size() == 5);
  }

  TEST_CASE("merge is order independent and idempotent") {
    auto inputs = fixture_inputs();
    const auto reference = persisted(merge(std::span<const DelegatedParse>(inputs)));
    std::mt19937 rng(3);
    for (int i = 0; i < 5; ++i) {
      std::shuffle(inputs.begin(), inputs.end(), rng);
      CHECK(persisted(merge(std::span<const DelegatedParse>(inputs))) == reference);
    }
    auto db = merge(std::span<const DelegatedParse>(inputs));
    std::vector<AsnDb> once{db};
    CHECK(merge(std::span<const AsnDb>(once)) == db);
  }

  TEST_CASE("persisted form round-trips") {
    auto inputs = fixture_inputs();
    auto db = merge(std::span<const DelegatedParse>(inputs));
    const auto text = persisted(db);
    CHECK(text.rfind("# ixpscope asndb v1\n", 0) == 0);
    std::istringstream in(text);
    auto back = read_asndb(in);
    CHECK(back == db);
    CHECK(persisted(back) == text);
  }

  TEST_CASE("corrupt persisted database") {
    std::istringstream bad("# ixpscope asndb v1\n1|UA|ripencc|20010101\n");
    CHECK_THROWS_AS(read_asndb(bad), DataError);
    std::istringstream dup("# ixpscope asndb v1\n1|UA|ripencc||allocated\n1|UA|ripencc||allocated\n");
    CHECK_THROWS_AS(read_asndb(dup), DataError);
    CHECK_THROWS_AS(load_asndb("/nonexistent/asndb.txt"), DataError);
    CHECK_THROWS_AS(parse_delegated_file("/nonexistent/delegated", Registry::arin), DataError);
  }

  TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}
