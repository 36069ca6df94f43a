#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sleepwake {

inline constexpr int kMinutesPerDay = 1440;

// Wall-clock minute, counted from 1970-01-01T00:00 with no time zone attached.
struct Timestamp {
  std::int64_t minutes = 0;

  int minute_of_day() const;
  std::string iso() const;  // "YYYY-MM-DDTHH:MM"

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// Parses "YYYY-MM-DDTHH:MM", "YYYY-MM-DD HH:MM" or either form with ":SS".
// Returns seconds since the epoch, or nullopt on malformed text.
std::optional<std::int64_t> parse_iso_seconds(std::string_view text);

// One subject's minute-level vector-magnitude counts.
struct EpochSeries {
  std::string subject_id;
  Timestamp start_time;
  std::vector<double> counts;
  int epoch_seconds = 60;

  std::size_t size() const { return counts.size(); }
  // Clock minute of 1-based sample t.
  int minute_of_day(std::size_t t) const;
};

struct CsvOptions {
  std::string timestamp_column = "timestamp";
  std::string count_column = "vm";
  char delimiter = ',';
};

EpochSeries parse_actigraphy(const std::filesystem::path& path, const CsvOptions& opts = {});
EpochSeries parse_actigraphy(std::istream& in, std::string subject_id, const CsvOptions& opts = {});

void write_actigraphy(std::ostream& out, const EpochSeries& series, const CsvOptions& opts = {});
void write_actigraphy(const std::filesystem::path& path, const EpochSeries& series,
                      const CsvOptions& opts = {});

struct WearPolicy {
  int max_zero_run_minutes = 120;
  int min_days = 5;
};

enum class WearRejection { ZeroRun, TooShort };

struct WearVerdict {
  std::optional<WearRejection> rejection;
  std::size_t longest_zero_run = 0;

  bool accepted() const { return !rejection.has_value(); }
};

std::size_t longest_zero_run(std::span<const double> counts);

// ZeroRun is checked before TooShort. A run of exactly max_zero_run_minutes rejects.
WearVerdict validate_wear(const EpochSeries& series, const WearPolicy& policy = {});

const char* to_string(WearRejection r);

}  // namespace sleepwake
