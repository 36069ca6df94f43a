#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sleepwake/cpd.hpp"
#include "sleepwake/ingest.hpp"
#include "sleepwake/types.hpp"

namespace sleepwake {

struct DetectConfig {
  ScheduleConfig schedule;
  double zero_shift = 1e-3;
};

// Refines each coarse STC transition to a single PELT change point searched only
// inside the region bounded by the previous refined point and the next coarse one.
// Each refined point inherits the kind of the transition it refines; when a region
// yields no change point the coarse index is kept (clamped into the region) with
// source = Fallback.
CpSet refine_change_points(const EpochSeries& series, const CpSet& cp_stc, const DetectConfig& cfg = {});

struct LabelBuild {
  LabelVector labels;
  bool degenerate = false;  // no change points: all-asleep labels
};

LabelBuild build_label_vector(std::size_t n, const CpSet& cps);

struct DnSplit {
  std::vector<double> diurnal;
  std::vector<double> nocturnal;
};

DnSplit split_dn(std::span<const double> counts, const LabelVector& labels);
inline DnSplit split_dn(const EpochSeries& series, const LabelVector& labels) {
  return split_dn(series.counts, labels);
}

}  // namespace sleepwake
