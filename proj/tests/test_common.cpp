#include <doctest.h>

#include "dap/common.hpp"

using namespace dap;

TEST_CASE("iso8601 parse and format round-trip") {
  CHECK(parse_time("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_time("1970-01-01T00:00:00+00:00") == 0);
  CHECK(parse_time("1970-01-01T01:00:00+01:00") == 0);
  CHECK(parse_time("1969-12-31T19:00:00-05:00") == 0);
  CHECK(parse_time("2018-06-21T17:00:00Z") == 1529600400);
  CHECK(format_time(1529600400) == "2018-06-21T17:00:00Z");

  const UtcTime t = parse_time("2016-02-29T23:59:59Z");
  CHECK(format_time(t) == "2016-02-29T23:59:59Z");
  CHECK(parse_time(format_time(t)) == t);
}

TEST_CASE("iso8601 rejects missing offset and malformed fields") {
  CHECK_THROWS_AS(parse_time("2018-06-21T17:00:00"), Error);
  CHECK_THROWS_AS(parse_time("2018-13-01T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_time("2018-06-21"), Error);
  CHECK_THROWS_AS(parse_time("not a time"), Error);
}

TEST_CASE("weekday and civil conversion") {
  // 2018-06-18 was a Monday.
  CHECK(weekday_of(parse_time("2018-06-18T12:00:00Z")) == 0);
  CHECK(weekday_of(parse_time("2018-06-23T12:00:00Z")) == 5);  // Saturday
  // Offset shifts the civil frame: 23:30 UTC Monday is Tuesday at +60 min.
  const UtcTime t = parse_time("2018-06-18T23:30:00Z");
  CHECK(weekday_of(t, 0) == 0);
  CHECK(weekday_of(t, 60) == 1);
  const CivilTime c = civil_of(t, -330);
  CHECK(c.hour == 18);
  CHECK(c.day == 18);
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 1e-17, 3.141592653589793, -123456.789}) {
    double back = 0;
    CHECK(try_parse_double(format_double(v), back));
    CHECK(back == v);
  }
}

TEST_CASE("rng determinism and fork independence") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(42);
  auto f1 = c.fork(1);
  auto f2 = c.fork(2);
  CHECK(f1.next_u64() != f2.next_u64());

  RngStream d(7);
  double mean = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = d.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 0.02);
}

TEST_CASE("rng next_below covers range uniformly enough") {
  RngStream r(3);
  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 5000; ++i) counts[r.next_below(5)]++;
  for (int k = 0; k < 5; ++k) CHECK(counts[k] > 800);
}
