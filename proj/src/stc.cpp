#include "sleepwake/stc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

constexpr int kParams = 5;
using Vec5 = Eigen::Matrix<double, kParams, 1>;
using Mat5 = Eigen::Matrix<double, kParams, kParams>;

constexpr std::array<double, kParams> kLower = {-0.5, 0.0, 0.0, 0.1, 1e-3};
constexpr std::array<double, kParams> kUpper = {1.0, 2.0, kCircadianPeriod, 50.0, 2.0};
constexpr int kPhi = 2;

Vec5 to_vec(const StcParams& p) { return Vec5(p.mes, p.amp, p.phi, p.gamma_hill, p.m_half); }

StcParams from_vec(const Vec5& v) {
  StcParams p;
  p.mes = v[0];
  p.amp = v[1];
  p.phi = v[2];
  p.gamma_hill = v[3];
  p.m_half = v[4];
  return p;
}

double wrap_phase(double phi) {
  double w = std::fmod(phi, kCircadianPeriod);
  if (w < 0.0) w += kCircadianPeriod;
  return w >= kCircadianPeriod ? 0.0 : w;
}

Vec5 project(Vec5 v) {
  for (int j = 0; j < kParams; ++j) {
    if (j == kPhi) {
      v[j] = wrap_phase(v[j]);
    } else {
      v[j] = std::clamp(v[j], kLower[j], kUpper[j]);
    }
  }
  return v;
}

// The model only depends on t mod period, so the least-squares problem over n
// samples reduces exactly to a weighted one over the 1440 phase bins:
//   sum_t (y_t - f_t)^2 = sum_k w_k (ybar_k - f_k)^2 + within-bin sum of squares.
struct PhaseBins {
  std::vector<double> t;      // representative sample index per occupied bin
  std::vector<double> sqrt_w;
  std::vector<double> mean;
  double within_ss = 0.0;
};

PhaseBins bin_by_phase(std::span<const double> y) {
  const auto period = static_cast<std::size_t>(kCircadianPeriod);
  std::vector<double> sum(period, 0.0), count(period, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t k = (i + 1) % period;
    sum[k] += y[i];
    count[k] += 1.0;
  }
  PhaseBins bins;
  std::vector<double> bin_mean(period, 0.0);
  for (std::size_t k = 0; k < period; ++k) {
    if (count[k] == 0.0) continue;
    bin_mean[k] = sum[k] / count[k];
    bins.t.push_back(static_cast<double>(k));
    bins.sqrt_w.push_back(std::sqrt(count[k]));
    bins.mean.push_back(bin_mean[k]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - bin_mean[(i + 1) % period];
    bins.within_ss += d * d;
  }
  return bins;
}

// Weighted residuals r_k = sqrt(w_k) * (f_k - ybar_k); returns sum r_k^2.
double residuals(const PhaseBins& bins, const Vec5& v, Eigen::VectorXd& r) {
  const StcParams p = from_vec(v);
  double ss = 0.0;
  for (std::size_t k = 0; k < bins.t.size(); ++k) {
    const double e = bins.sqrt_w[k] * (stc_eval(bins.t[k], p) - bins.mean[k]);
    r[static_cast<Eigen::Index>(k)] = e;
    ss += e * e;
  }
  return ss;
}

std::vector<double> normalized_counts(const EpochSeries& series, const Normalization& norm) {
  std::vector<double> y(series.counts.size());
  std::transform(series.counts.begin(), series.counts.end(), y.begin(),
                 [&](double c) { return norm.apply(c); });
  return y;
}

LocalFit descend(const PhaseBins& bins, const StcParams& start, const SolverConfig& cfg) {
  const auto m = static_cast<Eigen::Index>(bins.t.size());
  Eigen::VectorXd r(m), r_trial(m), r_step(m);
  Eigen::Matrix<double, Eigen::Dynamic, kParams> jac(m, kParams);

  Vec5 p = project(to_vec(start));
  double ss = residuals(bins, p, r);
  double lambda = cfg.initial_damping;

  LocalFit out;
  int iter = 0;
  bool need_jacobian = true;
  Mat5 jtj;
  Vec5 jtr;

  while (iter < cfg.max_iterations) {
    if (ss + bins.within_ss == 0.0) {
      out.converged = true;
      break;
    }
    if (need_jacobian) {
      // Forward differences; step backwards when the forward point leaves the box.
      for (int j = 0; j < kParams; ++j) {
        const double h = cfg.fd_step * std::max(1.0, std::abs(p[j]));
        Vec5 q = p;
        double signed_h = h;
        if (j != kPhi && q[j] + h > kUpper[j]) signed_h = -h;
        q[j] += signed_h;
        residuals(bins, q, r_step);
        jac.col(j) = (r_step - r) / signed_h;
      }
      jtj = jac.transpose() * jac;
      jtr = jac.transpose() * r;
      need_jacobian = false;
    }

    ++iter;
    Mat5 a = jtj;
    for (int j = 0; j < kParams; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-12);
    const Vec5 delta = a.ldlt().solve(-jtr);
    const Vec5 trial = project(p + delta);

    Vec5 step = trial - p;
    step[kPhi] = std::remainder(step[kPhi], kCircadianPeriod);
    const double step_norm = step.lpNorm<Eigen::Infinity>();

    const double ss_trial = residuals(bins, trial, r_trial);
    if (std::isfinite(ss_trial) && ss_trial < ss) {
      const double total = ss + bins.within_ss;
      const double rel_decrease = (ss - ss_trial) / total;
      p = trial;
      ss = ss_trial;
      r.swap(r_trial);
      lambda = std::max(lambda * 0.3, 1e-15);
      need_jacobian = true;
      if (rel_decrease < cfg.rel_rss_tol || step_norm < cfg.step_tol) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (step_norm < cfg.step_tol || lambda > 1e20) {
        out.converged = true;
        break;
      }
    }
  }

  out.params = from_vec(p);
  out.rss = ss + bins.within_ss;
  out.iterations = iter;
  return out;
}

}  // namespace

double cosine_eval(double t, double mes, double amp, double phi, double period) {
  return mes + amp * std::cos((t - phi) * 2.0 * std::numbers::pi / period);
}

double hill(double r, double gamma_hill, double m_half) {
  if (r < 0.0 || std::isnan(r)) throw Error(ErrorCode::DomainError, "hill argument must be >= 0");
  if (r == 0.0) return 0.0;
  // r^g / (m^g + r^g) rearranged so large exponents cannot overflow to inf/inf.
  return 1.0 / (1.0 + std::pow(m_half / r, gamma_hill));
}

double stc_eval(double t, const StcParams& p) {
  const double c = std::max(0.0, cosine_eval(t, 1.0, 1.0, p.phi, p.period));
  return p.mes + p.amp * hill(c, p.gamma_hill, p.m_half);
}

std::vector<double> stc_curve(const StcParams& p, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = stc_eval(static_cast<double>(i + 1), p);
  return out;
}

Normalization normalization_for(std::span<const double> counts) {
  if (counts.empty()) throw Error(ErrorCode::NonVaryingSeries, "empty series");
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*hi == *lo) throw Error(ErrorCode::NonVaryingSeries, "all counts equal");
  return Normalization{*lo, *hi};
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<StcParams> default_start_grid(const EpochSeries& series) {
  std::vector<double> y(series.counts.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(series.counts.begin(), series.counts.end());
  if (lo != series.counts.end() && *hi > *lo) y = normalized_counts(series, Normalization{*lo, *hi});

  const double p05 = percentile(y, 5.0);
  const double p95 = percentile(y, 95.0);

  constexpr std::array<int, 3> kAcrophaseClock = {12 * 60, 15 * 60, 18 * 60};
  constexpr std::array<double, 3> kGamma = {1.0, 3.0, 8.0};
  constexpr std::array<double, 3> kHalf = {0.5, 1.0, 1.5};

  // Sample t sits at clock minute start + t - 1, so clock c maps to t = c - start + 1.
  const int start_mod = series.start_time.minute_of_day();
  std::vector<StcParams> starts;
  starts.reserve(27);
  for (const int clock : kAcrophaseClock) {
    const double phi = wrap_phase(static_cast<double>(clock - start_mod + 1));
    for (const double g : kGamma) {
      for (const double m : kHalf) {
        StcParams p;
        p.mes = p05;
        p.amp = p95 - p05;
        p.phi = phi;
        p.gamma_hill = g;
        p.m_half = m;
        starts.push_back(p);
      }
    }
  }
  return starts;
}

LocalFit fit_stc_local(const EpochSeries& series, const StcParams& start, const SolverConfig& cfg) {
  const Normalization norm = normalization_for(series.counts);
  const auto y = normalized_counts(series, norm);
  return descend(bin_by_phase(y), start, cfg);
}

StcFit fit_stc(const EpochSeries& series, std::span<const StcParams> starts, const SolverConfig& cfg) {
  if (starts.empty()) throw Error(ErrorCode::InvalidConfig, "no starting points");
  StcFit fit;
  fit.normalization = normalization_for(series.counts);
  const auto y = normalized_counts(series, fit.normalization);
  const PhaseBins bins = bin_by_phase(y);

  fit.n_starts = static_cast<int>(starts.size());
  fit.per_start.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    fit.per_start.push_back(descend(bins, starts[i], cfg));
    const LocalFit& local = fit.per_start.back();
    if (fit.best_start_index < 0 || local.rss < fit.rss) {
      fit.best_start_index = static_cast<int>(i);
      fit.rss = local.rss;
      fit.params = local.params;
    }
  }
  fit.converged = std::any_of(fit.per_start.begin(), fit.per_start.end(),
                              [](const LocalFit& f) { return f.converged; });
  return fit;
}

Dichotomized dichotomize(std::span<const double> curve, const DichotomizeConfig& cfg) {
  if (!(cfg.range_fraction > 0.0 && cfg.range_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "range_fraction must lie in (0, 1)");
  }
  if (curve.empty()) throw Error(ErrorCode::ConstantCurve, "empty curve");
  const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
  if (*hi == *lo) throw Error(ErrorCode::ConstantCurve, "curve has zero range");

  Dichotomized out;
  out.threshold = *lo + cfg.range_fraction * (*hi - *lo);
  out.labels.resize(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) out.labels[i] = curve[i] >= out.threshold ? 1 : 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (out.labels[i] == out.labels[i - 1]) continue;
    out.change_points.push_back(ChangePoint{i + 1, out.labels[i] ? OnsetKind::WakeOnset : OnsetKind::SleepOnset,
                                            CpSource::STC});
  }
  return out;
}

}  // namespace sleepwake
