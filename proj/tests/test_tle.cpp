#include "doctest.h"
#include "leosched/orbital/tle.hpp"
#include "test_helpers.hpp"

using namespace leosched;
using namespace leosched::orbital;

namespace {
const char* kIss1 = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
const char* kIss2 = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";
}  // namespace

TEST_CASE("canonical ISS element set") {
  const auto cat = parse_tle_catalog(std::string("ISS (ZARYA)\n") + kIss1 + "\n" + kIss2 + "\n");
  REQUIRE(cat.errors.empty());
  REQUIRE(cat.records.size() == 1);
  const auto& r = cat.records[0];
  CHECK(r.name == "ISS (ZARYA)");
  CHECK(r.norad_id == 25544);
  CHECK(r.intl_designator == "98067A");
  CHECK(r.epoch_year == 2008);
  CHECK(r.epoch_day == doctest::Approx(264.51782528));
  CHECK(r.inclination == doctest::Approx(51.6416));
  CHECK(r.raan == doctest::Approx(247.4627));
  CHECK(r.eccentricity == doctest::Approx(0.0006703));
  CHECK(r.arg_perigee == doctest::Approx(130.5360));
  CHECK(r.mean_anomaly == doctest::Approx(325.0288));
  CHECK(r.mean_motion == doctest::Approx(15.72125391));
  CHECK(r.bstar == doctest::Approx(-0.11606e-4));
  CHECK(r.ndot == doctest::Approx(-0.00002182));
  CHECK(r.rev_number == 56353);
  // Day 264.51782528 of 2008 is 2008-09-20 12:25:40.104 UTC.
  CHECK(format_iso(r.epoch).substr(0, 23) == "2008-09-20T12:25:40.104");
}

TEST_CASE("empty input parses to nothing") {
  const auto cat = parse_tle_catalog("");
  CHECK(cat.records.empty());
  CHECK(cat.errors.empty());
}

TEST_CASE("checksum failures are reported with their line number") {
  std::string bad2 = kIss2;
  bad2.back() = '8';
  const auto cat = parse_tle_catalog(std::string("ISS\n") + kIss1 + "\n" + bad2 + "\n");
  CHECK(cat.records.empty());
  REQUIRE(cat.errors.size() == 1);
  CHECK(cat.errors[0].line == 3);
  CHECK(cat.errors[0].message.find("checksum") != std::string::npos);
}

TEST_CASE("truncated pairs and stray lines are errors, valid neighbours survive") {
  const std::string text = std::string(kIss1) + "\n" + "SOMETHING\n" + kIss1 + "\n" + kIss2 + "\n" + kIss2 + "\n";
  const auto cat = parse_tle_catalog(text);
  REQUIRE(cat.records.size() == 1);
  REQUIRE(cat.errors.size() == 2);
  CHECK(cat.errors[0].line == 1);
  CHECK(cat.errors[0].message.find("truncated") != std::string::npos);
  CHECK(cat.errors[1].line == 5);
}

TEST_CASE("malformed field is reported") {
  std::string bad1 = std::string(kIss1);
  bad1[20] = 'x';  // epoch day
  bad1[68] = static_cast<char>('0' + tle_checksum(bad1));
  const auto cat = parse_tle_catalog(bad1 + "\n" + kIss2 + "\n");
  REQUIRE(cat.errors.size() == 1);
  CHECK(cat.errors[0].line == 1);
  CHECK(cat.errors[0].message.find("epoch") != std::string::npos);
}

TEST_CASE("verification catalog parses cleanly") {
  const auto cat = parse_tle_catalog(testing::read_test_file("sgp4_verification.tle"));
  CHECK(cat.errors.empty());
  CHECK(cat.records.size() == 4);
  CHECK(cat.records[3].intl_designator.empty());
  CHECK(cat.records[3].nddot == doctest::Approx(0.13844e-3));
}

TEST_CASE("format_tle reproduces a parsed record") {
  const TleRecord r = parse_tle(kIss1, kIss2);
  const TleRecord again = format_tle(r);
  CHECK(again.line2 == std::string(kIss2));
  // Line 1 differs only in the element-set number padding convention.
  CHECK(again.bstar == doctest::Approx(r.bstar));
  CHECK(again.epoch == r.epoch);
  CHECK(tle_checksum(again.line1) == again.line1[68] - '0');
}

TEST_CASE("designator year") {
  CHECK(designator_year("20019BD") == 2020);
  CHECK(designator_year("98067A") == 1998);
  CHECK_FALSE(designator_year("").has_value());
  CHECK_FALSE(designator_year("xx123").has_value());
}
