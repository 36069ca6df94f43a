#include "sleepwake/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sleepwake/detect.hpp"
#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

constexpr double kMinSleepMinutes = 240.0;

double truncated_normal(std::mt19937_64& rng, double sd, double bound) {
  if (sd <= 0.0) return 0.0;
  std::normal_distribution<double> normal(0.0, sd);
  while (true) {
    const double v = normal(rng);
    if (std::abs(v) <= bound) return v;
  }
}

struct Event {
  std::int64_t abs_minute;
  OnsetKind kind;
};

}  // namespace

void validate(const SynthConfig& cfg) {
  const auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (cfg.days < 5) fail("days must be >= 5");
  if (cfg.wake_onset_mean < 0 || cfg.wake_onset_mean >= kMinutesPerDay || cfg.sleep_onset_mean < 0 ||
      cfg.sleep_onset_mean >= kMinutesPerDay || cfg.wake_onset_mean >= cfg.sleep_onset_mean) {
    fail("need 0 <= wake_onset_mean < sleep_onset_mean < 1440");
  }
  if (cfg.onset_jitter_sd_minutes < 0.0 || cfg.jitter_bound_minutes < 0.0) fail("jitter must be >= 0");
  if (cfg.transition_ramp_minutes < 0) fail("ramp must be >= 0");
  const auto gamma_ok = [](const GammaParams& g) { return g.shape > 0.0 && g.rate > 0.0; };
  if (!gamma_ok(cfg.day_gamma) || !gamma_ok(cfg.night_gamma)) fail("gamma shape and rate must be > 0");
  if (cfg.day_gamma.mean() <= cfg.night_gamma.mean()) fail("day mean must exceed night mean");

  const double night = kMinutesPerDay - (cfg.sleep_onset_mean - cfg.wake_onset_mean);
  const double day = cfg.sleep_onset_mean - cfg.wake_onset_mean;
  const double worst = 2.0 * cfg.jitter_bound_minutes;
  if (night - worst < kMinSleepMinutes) fail("jitter bound allows nights shorter than 4 h");
  if (day - worst <= 2.0 * cfg.transition_ramp_minutes) fail("jitter bound collapses the waking day");
}

std::pair<EpochSeries, GroundTruth> generate_subject(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);

  const auto n = static_cast<std::size_t>(cfg.days) * kMinutesPerDay;
  const std::int64_t origin = cfg.start_time.minutes;
  const auto floor_day = [](std::int64_t m) {
    return (m >= 0 ? m : m - (kMinutesPerDay - 1)) / kMinutesPerDay;
  };
  const std::int64_t first_day = floor_day(origin) - 1;
  const std::int64_t last_day = floor_day(origin + static_cast<std::int64_t>(n)) + 1;

  std::vector<Event> events;
  for (std::int64_t d = first_day; d <= last_day; ++d) {
    const double jw = truncated_normal(rng, cfg.onset_jitter_sd_minutes, cfg.jitter_bound_minutes);
    const double js = truncated_normal(rng, cfg.onset_jitter_sd_minutes, cfg.jitter_bound_minutes);
    const std::int64_t base = d * kMinutesPerDay;
    events.push_back({base + cfg.wake_onset_mean + std::llround(jw), OnsetKind::WakeOnset});
    events.push_back({base + cfg.sleep_onset_mean + std::llround(js), OnsetKind::SleepOnset});
  }

  GroundTruth truth;
  // Onset at absolute minute a is sample t = a - origin + 1.
  OnsetKind initial = OnsetKind::SleepOnset;
  for (const Event& e : events) {
    const std::int64_t t = e.abs_minute - origin + 1;
    if (t <= 1) {
      initial = e.kind;
    } else if (t <= static_cast<std::int64_t>(n)) {
      truth.true_cps.push_back({static_cast<std::size_t>(t), e.kind, CpSource::STC});
    }
  }
  if (truth.true_cps.empty()) throw Error(ErrorCode::InvalidConfig, "no transitions inside the series");
  truth.true_labels = build_label_vector(n, truth.true_cps).labels;
  if (truth.true_cps.front().kind == initial) throw Error(ErrorCode::InvalidConfig, "inconsistent schedule");

  // Awake weight per minute: the truth label, blended linearly across a ramp
  // centred on each onset.
  std::vector<double> awake(truth.true_labels.begin(), truth.true_labels.end());
  if (cfg.transition_ramp_minutes > 0) {
    const double half = cfg.transition_ramp_minutes / 2.0;
    for (const ChangePoint& cp : truth.true_cps) {
      const double centre = static_cast<double>(cp.index) - 0.5;
      const auto lo = static_cast<std::int64_t>(std::floor(centre - half));
      const auto hi = static_cast<std::int64_t>(std::ceil(centre + half));
      for (std::int64_t t = std::max<std::int64_t>(lo, 1); t <= std::min<std::int64_t>(hi, n); ++t) {
        const double rise = std::clamp((static_cast<double>(t) - (centre - half)) / (2.0 * half), 0.0, 1.0);
        awake[static_cast<std::size_t>(t - 1)] = cp.kind == OnsetKind::WakeOnset ? rise : 1.0 - rise;
      }
    }
  }

  std::gamma_distribution<double> day(cfg.day_gamma.shape, 1.0 / cfg.day_gamma.rate);
  std::gamma_distribution<double> night(cfg.night_gamma.shape, 1.0 / cfg.night_gamma.rate);

  EpochSeries series;
  series.subject_id = cfg.subject_id;
  series.start_time = cfg.start_time;
  series.counts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = day(rng);
    const double lo = night(rng);
    series.counts[i] = awake[i] * hi + (1.0 - awake[i]) * lo;
  }
  for (const NonwearRun& run : cfg.nonwear_runs) {
    if (run.start < 1) throw Error(ErrorCode::InvalidConfig, "non-wear run starts before minute 1");
    for (std::size_t t = run.start; t < run.start + run.length && t <= n; ++t) series.counts[t - 1] = 0.0;
  }
  return {std::move(series), std::move(truth)};
}

}  // namespace sleepwake
