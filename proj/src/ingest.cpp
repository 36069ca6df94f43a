#include "sleepwake/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(delim, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

int Timestamp::minute_of_day() const {
  const auto m = minutes % kMinutesPerDay;
  return static_cast<int>(m < 0 ? m + kMinutesPerDay : m);
}

std::string Timestamp::iso() const {
  namespace chr = std::chrono;
  const auto day = chr::floor<chr::days>(chr::sys_time<chr::minutes>(chr::minutes{minutes}));
  const chr::year_month_day ymd{day};
  const int mod = minute_of_day();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), mod / 60, mod % 60);
  return buf;
}

std::optional<std::int64_t> parse_iso_seconds(std::string_view text) {
  text = trim(text);
  // YYYY-MM-DD?HH:MM[:SS]
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    return std::nullopt;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
      !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi)) {
    return std::nullopt;
  }
  if (text.size() == 19 && (text[16] != ':' || !parse_int(text.substr(17, 2), s))) return std::nullopt;
  if (h > 23 || mi > 59 || s > 59) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const auto day_count = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(day_count) * 86400 + h * 3600 + mi * 60 + s;
}

int EpochSeries::minute_of_day(std::size_t t) const {
  return static_cast<int>((start_time.minute_of_day() + static_cast<std::int64_t>(t) - 1) % kMinutesPerDay);
}

EpochSeries parse_actigraphy(std::istream& in, std::string subject_id, const CsvOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MissingColumn, "empty file, no header");

  const auto header = split(line, opts.delimiter);
  const auto find_col = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, "no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = find_col(opts.timestamp_column);
  const std::size_t vm_col = find_col(opts.count_column);
  const std::size_t need = std::max(ts_col, vm_col) + 1;

  EpochSeries series;
  series.subject_id = std::move(subject_id);

  std::int64_t prev_seconds = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, opts.delimiter);
    const std::string where = " at line " + std::to_string(line_no);
    if (fields.size() < need) throw Error(ErrorCode::MalformedRow, "too few fields" + where);

    const auto secs = parse_iso_seconds(fields[ts_col]);
    if (!secs) throw Error(ErrorCode::BadTimestamp, "cannot parse '" + std::string(fields[ts_col]) + "'" + where);

    double value = 0.0;
    const auto vm = fields[vm_col];
    const auto [ptr, ec] = std::from_chars(vm.data(), vm.data() + vm.size(), value);
    if (ec != std::errc{} || ptr != vm.data() + vm.size() || !std::isfinite(value)) {
      throw Error(ErrorCode::MalformedRow, "bad count '" + std::string(vm) + "'" + where);
    }
    if (value < 0.0) throw Error(ErrorCode::NegativeCount, "count " + std::string(vm) + where);

    if (series.counts.empty()) {
      series.start_time = Timestamp{*secs / 60};
    } else {
      const std::int64_t step = *secs - prev_seconds;
      if (step <= 0) throw Error(ErrorCode::NonMonotonicTimestamps, "timestamp does not advance" + where);
      if (step % 60 != 0) {
        throw Error(ErrorCode::WrongEpochLength, std::to_string(step) + " s between samples" + where);
      }
      if (step != 60) throw Error(ErrorCode::TimestampGap, std::to_string(step / 60) + " min gap" + where);
    }
    prev_seconds = *secs;
    series.counts.push_back(value);
  }
  if (series.counts.empty()) throw Error(ErrorCode::EmptySeries, "no samples");
  return series;
}

EpochSeries parse_actigraphy(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_actigraphy(in, path.stem().string(), opts);
}

void write_actigraphy(std::ostream& out, const EpochSeries& series, const CsvOptions& opts) {
  out << opts.timestamp_column << opts.delimiter << opts.count_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < series.counts.size(); ++i) {
    const Timestamp ts{series.start_time.minutes + static_cast<std::int64_t>(i)};
    const auto res = std::to_chars(buf, buf + sizeof buf, series.counts[i]);
    out << ts.iso() << opts.delimiter << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

void write_actigraphy(const std::filesystem::path& path, const EpochSeries& series, const CsvOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_actigraphy(out, series, opts);
}

std::size_t longest_zero_run(std::span<const double> counts) {
  std::size_t best = 0, run = 0;
  for (const double c : counts) {
    run = (c == 0.0) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

WearVerdict validate_wear(const EpochSeries& series, const WearPolicy& policy) {
  if (policy.max_zero_run_minutes < 1 || policy.min_days < 1) {
    throw Error(ErrorCode::InvalidConfig, "wear policy thresholds must be >= 1");
  }
  WearVerdict verdict;
  verdict.longest_zero_run = longest_zero_run(series.counts);
  if (verdict.longest_zero_run >= static_cast<std::size_t>(policy.max_zero_run_minutes)) {
    verdict.rejection = WearRejection::ZeroRun;
  } else if (series.size() < static_cast<std::size_t>(policy.min_days) * kMinutesPerDay) {
    verdict.rejection = WearRejection::TooShort;
  }
  return verdict;
}

const char* to_string(WearRejection r) {
  switch (r) {
    case WearRejection::ZeroRun: return "ZeroRun";
    case WearRejection::TooShort: return "TooShort";
  }
  return "Unknown";
}

}  // namespace sleepwake
