#include <stdexcept>

#include "doctest.h"
#include "leosched/time.hpp"

using namespace leosched;

TEST_CASE("iso timestamps round-trip") {
  const Timestamp t = parse_iso("2020-03-28T00:00:12Z");
  CHECK(format_iso(t) == "2020-03-28T00:00:12Z");
  CHECK(to_unix_seconds(t) == doctest::Approx(1585353612.0));
  CHECK(format_iso(parse_iso("2021-01-02T03:04:05.250Z")) == "2021-01-02T03:04:05.250000Z");
  CHECK(parse_iso("2020-03-18") == parse_iso("2020-03-18T00:00:00Z"));
}

TEST_CASE("malformed timestamps are rejected") {
  CHECK_THROWS_AS(parse_iso("2020-13-01"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso("2020-03-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso("2020-03-18T25:00Z"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso("2020-03-18x"), std::invalid_argument);
}

TEST_CASE("julian date of the J2000 epoch") {
  CHECK(julian_date(parse_iso("2000-01-01T12:00:00Z")) == doctest::Approx(2451545.0));
}
