#include <random>

#include "doctest.h"
#include "sleepwake/detect.hpp"
#include "sleepwake/error.hpp"
#include "sleepwake/stc.hpp"
#include "sleepwake/synth.hpp"

using namespace sleepwake;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

ChangePoint wake(std::size_t t) { return {t, OnsetKind::WakeOnset, CpSource::STC}; }
ChangePoint sleep(std::size_t t) { return {t, OnsetKind::SleepOnset, CpSource::STC}; }

void check_bounded(const CpSet& refined, const CpSet& coarse, std::size_t n) {
  REQUIRE(refined.size() == coarse.size());
  for (std::size_t i = 0; i < refined.size(); ++i) {
    CHECK(refined[i].kind == coarse[i].kind);
    const std::size_t lo = i == 0 ? 1 : refined[i - 1].index;
    const std::size_t hi = i + 1 < coarse.size() ? coarse[i + 1].index : n;
    CHECK(refined[i].index > lo);
    CHECK(refined[i].index < hi);
  }
}

}  // namespace

TEST_CASE("build_label_vector") {
  const auto b = build_label_vector(10, {wake(3), sleep(7)});
  CHECK(b.labels == LabelVector{0, 0, 1, 1, 1, 1, 0, 0, 0, 0});
  CHECK_FALSE(b.degenerate);

  const auto lead_awake = build_label_vector(6, {sleep(2), wake(5)});
  CHECK(lead_awake.labels == LabelVector{1, 0, 0, 0, 1, 1});

  const auto empty = build_label_vector(4, {});
  CHECK(empty.degenerate);
  CHECK(empty.labels == LabelVector{0, 0, 0, 0});

  CHECK(error_of([] { build_label_vector(10, {wake(3), wake(7)}); }) == ErrorCode::NonAlternatingKinds);
  CHECK_THROWS_AS(build_label_vector(10, {wake(7), sleep(3)}), Error);
  CHECK_THROWS_AS(build_label_vector(10, {wake(11)}), Error);
}

TEST_CASE("split_dn") {
  const auto s = split_dn(std::vector<double>{2, 3, 4}, LabelVector{1, 0, 1});
  CHECK(s.diurnal == std::vector<double>{2, 0, 4});
  CHECK(s.nocturnal == std::vector<double>{0, 3, 0});

  const auto all_day = split_dn(std::vector<double>{5, 6}, LabelVector{1, 1});
  CHECK(all_day.diurnal == std::vector<double>{5, 6});
  CHECK(all_day.nocturnal == std::vector<double>{0, 0});

  const auto zeros = split_dn(std::vector<double>{0, 0, 0}, LabelVector{1, 0, 1});
  CHECK(zeros.diurnal == std::vector<double>{0, 0, 0});
  CHECK(zeros.nocturnal == std::vector<double>{0, 0, 0});

  CHECK(error_of([] { split_dn(std::vector<double>{1, 2}, LabelVector{1}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("D + N = X for random labels") {
  std::mt19937_64 rng(6);
  std::gamma_distribution<double> g(0.6, 100.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(200);
    LabelVector l(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = g(rng);
      l[i] = static_cast<std::uint8_t>(rng() & 1);
    }
    const auto s = split_dn(x, l);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(s.diurnal[i] + s.nocturnal[i] == x[i]);
      CHECK((s.diurnal[i] == 0.0 || s.nocturnal[i] == 0.0));
    }
  }
}

TEST_CASE("refine requires three alternating transitions") {
  EpochSeries s;
  s.counts.assign(100, 1.0);
  CHECK(error_of([&] { refine_change_points(s, {wake(10), sleep(50)}); }) == ErrorCode::TooFewTransitions);
  CHECK(error_of([&] { refine_change_points(s, {wake(10), wake(50), sleep(70)}); }) ==
        ErrorCode::NonAlternatingKinds);
}

TEST_CASE("refine snaps to sharp steps that coincide with the coarse transitions") {
  // Noiseless step: 5 while asleep, 500 while awake, steps exactly at the coarse indices.
  const CpSet coarse{wake(421), sleep(1291), wake(1861), sleep(2731), wake(3301), sleep(4171)};
  EpochSeries s;
  s.counts.assign(4800, 5.0);
  for (std::size_t i = 0; i < coarse.size(); i += 2) {
    for (std::size_t t = coarse[i].index; t < coarse[i + 1].index; ++t) s.counts[t - 1] = 500.0;
  }
  const auto refined = refine_change_points(s, coarse);
  REQUIRE(refined.size() == coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(refined[i].index == coarse[i].index);
    CHECK(refined[i].kind == coarse[i].kind);
    CHECK(refined[i].source == CpSource::PELT);
  }
}

TEST_CASE("refine falls back to the coarse index on a flat device") {
  EpochSeries s;
  s.counts.assign(3000, 0.0);
  const CpSet coarse{wake(400), sleep(1300), wake(1800), sleep(2700)};
  const auto refined = refine_change_points(s, coarse);
  REQUIRE(refined.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(refined[i].source == CpSource::Fallback);
    CHECK(refined[i].index == coarse[i].index);
  }
  check_bounded(refined, coarse, s.size());
}

TEST_CASE("refine tracks jittered synthetic onsets") {
  int within = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.onset_jitter_sd_minutes = 45.0;
    const auto [series, truth] = generate_subject(cfg);
    const auto fit = fit_stc(series, default_start_grid(series));
    const auto coarse = dichotomize(fit.curve(series.size())).change_points;
    const auto refined = refine_change_points(series, coarse);
    check_bounded(refined, coarse, series.size());
    const auto labels = build_label_vector(series.size(), refined);
    CHECK_FALSE(labels.degenerate);
    CHECK(refined == refine_change_points(series, coarse));

    for (const auto& t : truth.true_cps) {
      long best = 1 << 30;
      for (const auto& cp : refined) {
        if (cp.kind == t.kind) best = std::min(best, std::labs(static_cast<long>(cp.index) - static_cast<long>(t.index)));
      }
      ++total;
      if (best <= 15) ++within;
    }
  }
  CHECK(within >= 0.9 * total);
}
