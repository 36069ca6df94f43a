#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sleepwake/detect.hpp"
#include "sleepwake/types.hpp"

namespace sleepwake {

// Returned by r_metric when nocturnal activity has zero variance.
inline constexpr double kInfiniteR = std::numeric_limits<double>::infinity();

// Ratio of the squared deviations of D to those of N, means taken over all n minutes.
double r_metric(const DnSplit& split);

enum class FlagReason { LowR, SmallImprovement, Fallback, Degenerate };
const char* to_string(FlagReason reason);
std::optional<FlagReason> flag_reason_from_string(std::string_view text);

struct ScreenConfig {
  double epsilon = 10.0;
};

// nullopt = pass. LowR wins when both triggers fire.
std::optional<FlagReason> screen(double r_refined, double r_stc, const ScreenConfig& cfg = {});

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// P(T > t) for Student's t with df degrees of freedom.
double student_t_upper_tail(double t, double df);

struct TTestResult {
  double t_stat = 0.0;
  double p_value = 0.5;
  int df = 0;
};

// One-sided paired t-test of H1: post > pre. When every difference is exactly zero
// the result is t = 0, p = 0.5; equal nonzero differences raise ZeroVarianceDifferences.
TTestResult paired_one_sided_t(std::span<const double> pre, std::span<const double> post);

struct SubjectReport {
  std::string subject_id;
  double r_stc = 0.0;
  double r_refined = 0.0;
  bool flagged = false;
  std::optional<FlagReason> flag_reason;
  CpSet cp_refined;
  CpSet cp_stc;
  double runtime_seconds = 0.0;
};

struct CohortSummary {
  std::size_t subjects = 0;
  std::size_t flagged_count = 0;
  std::size_t infinite_count = 0;  // subjects with a +inf R, left out of the test
  std::vector<std::string> finite_ids;
  std::vector<double> delta_r;     // r_refined - r_stc, aligned with finite_ids
  std::optional<TTestResult> test;
  std::string test_note;           // why `test` is absent, if it is
};

// Deterministic fold in subject-id order. TooFewSubjects for fewer than two reports.
CohortSummary cohort_summary(std::span<const SubjectReport> reports);

}  // namespace sleepwake
