#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sleepwake/ingest.hpp"
#include "sleepwake/types.hpp"

namespace sleepwake {

struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
  double mean() const { return shape / rate; }
};

struct NonwearRun {
  std::size_t start = 1;  // 1-based minute
  std::size_t length = 0;
};

struct SynthConfig {
  std::string subject_id = "synth";
  Timestamp start_time{28401120};  // 2024-01-01T00:00
  int days = 7;
  int sleep_onset_mean = 21 * 60 + 30;  // clock minutes
  int wake_onset_mean = 7 * 60;
  double onset_jitter_sd_minutes = 45.0;
  double jitter_bound_minutes = 120.0;  // truncation of the jitter normal
  GammaParams day_gamma{1.5, 1.5 / 500.0};
  GammaParams night_gamma{0.5, 0.5 / 5.0};
  int transition_ramp_minutes = 0;
  std::vector<NonwearRun> nonwear_runs;
  std::uint64_t seed = 1;
};

struct GroundTruth {
  CpSet true_cps;
  LabelVector true_labels;
};

// Throws InvalidConfig when the schedule could produce nights shorter than 4 h,
// the day mean does not exceed the night mean, or fewer than 5 days are requested.
void validate(const SynthConfig& cfg);

std::pair<EpochSeries, GroundTruth> generate_subject(const SynthConfig& cfg);

}  // namespace sleepwake
