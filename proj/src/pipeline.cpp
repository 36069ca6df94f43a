#include "sleepwake/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace sleepwake {

SubjectResult analyze_subject(const EpochSeries& series, const PipelineConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SubjectResult out;
  out.report.subject_id = series.subject_id;

  const auto starts = default_start_grid(series);
  out.fit = fit_stc(series, starts, cfg.solver);
  out.curve = out.fit.curve(series.size());
  out.coarse = dichotomize(out.curve, cfg.dichotomize);
  out.report.cp_stc = out.coarse.change_points;

  if (out.coarse.change_points.size() < 3) {
    out.degenerate = true;
    out.report.cp_refined = out.coarse.change_points;
    out.refined_labels = out.coarse.labels;
  } else {
    out.report.cp_refined = refine_change_points(series, out.coarse.change_points, cfg.detect);
    out.refined_labels = build_label_vector(series.size(), out.report.cp_refined).labels;
    out.fallback_count = static_cast<std::size_t>(
        std::count_if(out.report.cp_refined.begin(), out.report.cp_refined.end(),
                      [](const ChangePoint& cp) { return cp.source == CpSource::Fallback; }));
  }

  out.stc_split = split_dn(series, out.coarse.labels);
  out.refined_split = split_dn(series, out.refined_labels);
  out.report.r_stc = r_metric(out.stc_split);
  out.report.r_refined = r_metric(out.refined_split);

  if (out.degenerate) {
    out.report.flag_reason = FlagReason::Degenerate;
  } else if (const auto flag = screen(out.report.r_refined, out.report.r_stc, cfg.screen)) {
    out.report.flag_reason = flag;
  } else if (out.fallback_count > 0) {
    out.report.flag_reason = FlagReason::Fallback;
  }
  out.report.flagged = out.report.flag_reason.has_value();
  out.report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace sleepwake
