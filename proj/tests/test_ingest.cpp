#include <random>
#include <sstream>

#include "doctest.h"
#include "sleepwake/error.hpp"
#include "sleepwake/ingest.hpp"

using namespace sleepwake;

namespace {

EpochSeries parse(const std::string& text, const CsvOptions& opts = {}) {
  std::istringstream in(text);
  return parse_actigraphy(in, "s1", opts);
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::IoError;
}

EpochSeries series_of(std::vector<double> counts) {
  EpochSeries s;
  s.subject_id = "x";
  s.counts = std::move(counts);
  return s;
}

}  // namespace

TEST_CASE("parse three consecutive minutes") {
  const auto s = parse("timestamp,vm\n2024-03-01T23:59,0\n2024-03-02T00:00,12.5\n2024-03-02 00:01:00,300\n");
  CHECK(s.size() == 3);
  CHECK(s.counts == std::vector<double>{0.0, 12.5, 300.0});
  CHECK(s.start_time.iso() == "2024-03-01T23:59");
  CHECK(s.epoch_seconds == 60);
  CHECK(s.minute_of_day(1) == 1439);
  CHECK(s.minute_of_day(2) == 0);
}

TEST_CASE("configurable column names and extra columns") {
  CsvOptions opts;
  opts.timestamp_column = "Date Time";
  opts.count_column = "Vector Magnitude";
  const auto s = parse("Axis1,Date Time,Vector Magnitude\n5,2024-01-01T00:00,7\n6,2024-01-01T00:01,8\n", opts);
  CHECK(s.counts == std::vector<double>{7.0, 8.0});
}

TEST_CASE("parse errors") {
  CHECK(parse_error("time,vm\n2024-01-01T00:00,1\n") == ErrorCode::MissingColumn);
  CHECK(parse_error("timestamp,count\n2024-01-01T00:00,1\n") == ErrorCode::MissingColumn);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00,1\n2024-01-01T00:00,2\n") == ErrorCode::NonMonotonicTimestamps);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:05,1\n2024-01-01T00:04,2\n") == ErrorCode::NonMonotonicTimestamps);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00,-1\n") == ErrorCode::NegativeCount);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00:00,1\n2024-01-01T00:00:30,2\n") == ErrorCode::WrongEpochLength);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00,1\n2024-01-01T00:03,2\n") == ErrorCode::TimestampGap);
  CHECK(parse_error("timestamp,vm\n2024-02-30T00:00,1\n") == ErrorCode::BadTimestamp);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00,abc\n") == ErrorCode::MalformedRow);
  CHECK(parse_error("timestamp,vm\n2024-01-01T00:00,nan\n") == ErrorCode::MalformedRow);
  CHECK(parse_error("timestamp,vm\n") == ErrorCode::EmptySeries);
}

TEST_CASE("write then parse preserves counts exactly") {
  std::mt19937_64 rng(11);
  std::gamma_distribution<double> g(0.7, 80.0);
  EpochSeries s = series_of({});
  s.start_time = Timestamp{*parse_iso_seconds("2023-12-31T22:17") / 60};
  for (int i = 0; i < 3000; ++i) s.counts.push_back(i % 97 == 0 ? 0.0 : g(rng));
  std::stringstream buf;
  write_actigraphy(buf, s);
  const auto back = parse_actigraphy(buf, "x");
  CHECK(back.start_time == s.start_time);
  CHECK(back.counts == s.counts);
}

TEST_CASE("validate_wear rules") {
  const int day = kMinutesPerDay;
  SUBCASE("120-minute zero run rejects") {
    std::vector<double> c(7 * day, 3.0);
    std::fill(c.begin() + 500, c.begin() + 620, 0.0);
    const auto v = validate_wear(series_of(c));
    CHECK(v.rejection == WearRejection::ZeroRun);
    CHECK(v.longest_zero_run == 120);
  }
  SUBCASE("119-minute zero run is fine") {
    std::vector<double> c(7 * day, 3.0);
    std::fill(c.begin() + 500, c.begin() + 619, 0.0);
    CHECK(validate_wear(series_of(c)).accepted());
  }
  SUBCASE("four days is too short") {
    CHECK(validate_wear(series_of(std::vector<double>(4 * day, 1.0))).rejection == WearRejection::TooShort);
  }
  SUBCASE("seven days with a 45-minute gap is accepted") {
    std::vector<double> c(7 * day, 1.0);
    std::fill(c.begin() + 100, c.begin() + 145, 0.0);
    const auto v = validate_wear(series_of(c));
    CHECK(v.accepted());
    CHECK(v.longest_zero_run == 45);
  }
  SUBCASE("zero run is checked before length") {
    std::vector<double> c(2 * day, 1.0);
    std::fill(c.begin(), c.begin() + 200, 0.0);
    CHECK(validate_wear(series_of(c)).rejection == WearRejection::ZeroRun);
  }
  SUBCASE("bad policy") {
    CHECK_THROWS_AS(validate_wear(series_of({1.0}), WearPolicy{0, 5}), Error);
  }
}

TEST_CASE("zero-run scan matches brute force and is stable under nonzero appends") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution zero(0.8);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> c(rng() % 400 + 1);
    for (auto& v : c) v = zero(rng) ? 0.0 : 1.0;

    std::size_t brute = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::size_t j = i;
      while (j < c.size() && c[j] == 0.0) ++j;
      brute = std::max(brute, j - i);
    }
    REQUIRE(longest_zero_run(c) == brute);

    const WearPolicy policy{30, 1};
    const auto before = validate_wear(series_of(c), policy);
    CHECK(before.longest_zero_run == validate_wear(series_of(c), policy).longest_zero_run);
    auto appended = c;
    appended.push_back(2.0);
    const auto after = validate_wear(series_of(appended), policy);
    if (before.rejection != WearRejection::ZeroRun) CHECK(after.rejection != WearRejection::ZeroRun);
  }
}
