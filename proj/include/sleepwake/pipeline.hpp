#pragma once

#include <cstddef>
#include <vector>

#include "sleepwake/detect.hpp"
#include "sleepwake/eval.hpp"
#include "sleepwake/ingest.hpp"
#include "sleepwake/stc.hpp"

namespace sleepwake {

struct PipelineConfig {
  WearPolicy wear;
  SolverConfig solver;
  DichotomizeConfig dichotomize;
  DetectConfig detect;
  ScreenConfig screen;
};

// Everything computed for one wear-accepted subject.
struct SubjectResult {
  SubjectReport report;
  StcFit fit;
  std::vector<double> curve;  // normalized STC curve, t = 1..n
  Dichotomized coarse;
  LabelVector refined_labels;
  DnSplit stc_split;
  DnSplit refined_split;
  std::size_t fallback_count = 0;
  bool degenerate = false;
};

// fit -> dichotomize -> refine -> split -> R for both label sets -> screen.
// Subjects with fewer than three coarse transitions keep the coarse labels and are
// flagged Degenerate instead of failing.
SubjectResult analyze_subject(const EpochSeries& series, const PipelineConfig& cfg = {});

}  // namespace sleepwake
