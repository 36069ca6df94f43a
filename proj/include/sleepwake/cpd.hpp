#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace sleepwake {

struct GammaSegmentModel {
  double shape_alpha = 1.0;
  double zero_shift = 1e-3;
};

struct CpSearchResult {
  // 1-based index of the last sample of each left segment.
  std::vector<std::size_t> change_points;
  double total_cost = 0.0;
  double penalty_used = 0.0;
  int iterations = 0;
};

// Floors every sample at `zero_shift` so the gamma cost is defined.
std::vector<double> shift_zeros(std::span<const double> x, double zero_shift = 1e-3);

// -2 log-likelihood of a gamma segment with known shape and the rate profiled at its
// MLE, minus terms that are identical for every segmentation: 2 n alpha ln(mean x).
double gamma_segment_cost(std::span<const double> x, double shape_alpha);

// Method of moments: mean^2 / variance, clamped to [0.05, 100]. ZeroVariance if constant.
double estimate_shape(std::span<const double> x);

inline constexpr std::size_t kMinSegmentLength = 2;

// Exact penalized segmentation by PELT. penalty may be +inf.
CpSearchResult pelt(std::span<const double> x, double penalty, double shape_alpha);

struct ScheduleConfig {
  double initial_scale = 10.0;  // lambda_0 = initial_scale * alpha * ln n
  double decay = 0.5;
  int max_iterations = 20;
  double floor_scale = 3.0;     // penalties never drop below floor_scale * ln n
};

struct SingleCpResult {
  std::size_t index = 0;  // region-local, 1-based last sample of the left segment
  double penalty_used = 0.0;
  int iterations = 0;
  double shape_alpha = 0.0;
};

// Runs PELT with a decreasing penalty until it returns at least one change point and
// keeps the one closest to `anchor` (ties to the earlier index). Both `anchor` and the
// result use the same 1-based coordinate as CpSearchResult::change_points.
// Throws NoChangePointFound when the schedule is exhausted.
SingleCpResult single_cp_search(std::span<const double> region, std::size_t anchor,
                                const ScheduleConfig& cfg = {});

}  // namespace sleepwake
