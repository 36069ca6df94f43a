#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sleepwake/detect.hpp"
#include "sleepwake/error.hpp"
#include "sleepwake/stc.hpp"
#include "sleepwake/synth.hpp"

using namespace sleepwake;

TEST_CASE("generation is deterministic in the seed") {
  SynthConfig cfg;
  cfg.seed = 77;
  const auto [a, ta] = generate_subject(cfg);
  const auto [b, tb] = generate_subject(cfg);
  CHECK(a.counts == b.counts);
  CHECK(ta.true_cps == tb.true_cps);
  cfg.seed = 78;
  CHECK(generate_subject(cfg).first.counts != a.counts);
}

TEST_CASE("no jitter puts onsets on the configured clock") {
  SynthConfig cfg;
  cfg.onset_jitter_sd_minutes = 0.0;
  cfg.transition_ramp_minutes = 0;
  const auto [s, truth] = generate_subject(cfg);
  REQUIRE(truth.true_cps.size() == 14);
  for (std::size_t i = 0; i < truth.true_cps.size(); ++i) {
    const auto& cp = truth.true_cps[i];
    const int clock = s.minute_of_day(cp.index);
    CHECK(clock == (cp.kind == OnsetKind::WakeOnset ? cfg.wake_onset_mean : cfg.sleep_onset_mean));
    CHECK(cp.kind == (i % 2 == 0 ? OnsetKind::WakeOnset : OnsetKind::SleepOnset));
  }
}

TEST_CASE("truth labels and change points agree") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.transition_ramp_minutes = 20;
    cfg.start_time.minutes += 13 * 60 + 7;  // mid-afternoon start
    const auto [s, truth] = generate_subject(cfg);
    CHECK(build_label_vector(s.size(), truth.true_cps).labels == truth.true_labels);
    for (std::size_t i = 1; i < truth.true_cps.size(); ++i) {
      CHECK(truth.true_cps[i].kind != truth.true_cps[i - 1].kind);
      if (truth.true_cps[i].kind == OnsetKind::WakeOnset) {
        CHECK(truth.true_cps[i].index - truth.true_cps[i - 1].index >= 240);
      }
    }
    for (const double c : s.counts) CHECK(c >= 0.0);
  }
}

TEST_CASE("non-wear runs are exact zeros") {
  SynthConfig cfg;
  cfg.nonwear_runs = {{100, 30}, {5000, 200}};
  const auto [s, truth] = generate_subject(cfg);
  for (std::size_t t = 100; t < 130; ++t) CHECK(s.counts[t - 1] == 0.0);
  for (std::size_t t = 5000; t < 5200; ++t) CHECK(s.counts[t - 1] == 0.0);
  CHECK(s.counts[130] > 0.0);
  CHECK(validate_wear(s).rejection == WearRejection::ZeroRun);
}

TEST_CASE("day activity dominates night activity") {
  SynthConfig cfg;
  cfg.seed = 5;
  const auto [s, truth] = generate_subject(cfg);
  double day = 0.0, night = 0.0;
  std::size_t nd = 0, nn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (truth.true_labels[i]) {
      day += s.counts[i];
      ++nd;
    } else {
      night += s.counts[i];
      ++nn;
    }
  }
  CHECK((day / nd) / (night / nn) > 10.0);
}

TEST_CASE("invalid configurations") {
  const auto invalid = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    try {
      generate_subject(cfg);
    } catch (const Error& e) {
      return e.code() == ErrorCode::InvalidConfig;
    }
    return false;
  };
  CHECK(invalid([](SynthConfig& c) { c.days = 4; }));
  CHECK(invalid([](SynthConfig& c) { c.night_gamma = c.day_gamma; }));
  CHECK(invalid([](SynthConfig& c) { c.jitter_bound_minutes = 400.0; }));
  CHECK(invalid([](SynthConfig& c) { c.wake_onset_mean = 23 * 60; }));
  CHECK(invalid([](SynthConfig& c) { c.day_gamma.rate = 0.0; }));
}

TEST_CASE("STC baseline error grows with onset jitter") {
  double previous = -1.0;
  for (const double sd : {0.0, 30.0, 60.0}) {
    double err = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SynthConfig cfg;
      cfg.seed = seed;
      cfg.onset_jitter_sd_minutes = sd;
      const auto [s, truth] = generate_subject(cfg);
      const auto coarse = dichotomize(fit_stc(s, default_start_grid(s)).curve(s.size())).change_points;
      for (const auto& t : truth.true_cps) {
        long best = 1L << 30;
        for (const auto& cp : coarse) {
          if (cp.kind == t.kind) best = std::min(best, std::labs(static_cast<long>(cp.index) - static_cast<long>(t.index)));
        }
        err += static_cast<double>(best);
        ++count;
      }
    }
    const double mean_err = err / count;
    CHECK(mean_err > previous);
    previous = mean_err;
  }
}
