#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sleepwake/ingest.hpp"
#include "sleepwake/types.hpp"

namespace sleepwake {

inline constexpr double kCircadianPeriod = 1440.0;

// Sigmoidally-transformed cosine. mes and amp live in normalized count units,
// phi in minutes on the 1-based sample axis.
struct StcParams {
  double mes = 0.0;
  double amp = 1.0;
  double phi = 0.0;
  double gamma_hill = 1.0;
  double m_half = 1.0;
  double period = kCircadianPeriod;

  friend bool operator==(const StcParams&, const StcParams&) = default;
};

// mes + amp * cos((t - phi) * 2pi / period)
double cosine_eval(double t, double mes, double amp, double phi, double period);

// r^gamma / (m^gamma + r^gamma); throws DomainError for r < 0.
double hill(double r, double gamma_hill, double m_half);

// mes + amp * hill(1 + cos((t - phi) * 2pi / T), gamma, m). The Hill argument is the
// shifted unit cosine, so it always lies in [0, 2].
double stc_eval(double t, const StcParams& p);

// stc_eval at t = 1..n.
std::vector<double> stc_curve(const StcParams& p, std::size_t n);

struct Normalization {
  double min = 0.0;
  double max = 1.0;

  double apply(double raw) const { return (raw - min) / (max - min); }
  double invert(double unit) const { return min + unit * (max - min); }
};

struct SolverConfig {
  double fd_step = 1e-6;
  double rel_rss_tol = 1e-10;
  double step_tol = 1e-8;
  int max_iterations = 200;
  double initial_damping = 1e-3;
};

struct LocalFit {
  StcParams params;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct StcFit {
  StcParams params;
  double rss = 0.0;
  int n_starts = 0;
  int best_start_index = -1;
  bool converged = false;
  Normalization normalization;
  std::vector<LocalFit> per_start;

  // Fitted curve in normalized units at t = 1..n.
  std::vector<double> curve(std::size_t n) const { return stc_curve(params, n); }
};

// Min-max normalization of the raw counts; NonVaryingSeries if all counts are equal.
Normalization normalization_for(std::span<const double> counts);

// 27 starts: acrophase at 12:00, 15:00, 18:00 clock time, gamma in {1, 3, 8},
// m in {0.5, 1.0, 1.5}; mes/amp from the 5th/95th percentiles of normalized counts.
std::vector<StcParams> default_start_grid(const EpochSeries& series);

// Linear-interpolated percentile (q in [0, 100]) of the values.
double percentile(std::span<const double> values, double q);

// One damped Gauss-Newton (Levenberg-Marquardt) descent from `start` on the
// normalized counts.
LocalFit fit_stc_local(const EpochSeries& series, const StcParams& start, const SolverConfig& cfg = {});

// Multistart fit; the lowest-RSS local optimum wins, ties to the lowest start index.
// If no start converges the best-effort fit is returned with converged = false.
StcFit fit_stc(const EpochSeries& series, std::span<const StcParams> starts, const SolverConfig& cfg = {});

struct DichotomizeConfig {
  double range_fraction = 0.2;
};

struct Dichotomized {
  double threshold = 0.0;
  LabelVector labels;
  CpSet change_points;  // source = STC, kinds alternate
};

// Awake where curve >= min + fraction * (max - min).
Dichotomized dichotomize(std::span<const double> curve, const DichotomizeConfig& cfg = {});

}  // namespace sleepwake
