#include "sleepwake/eval.hpp"

#include <algorithm>
#include <cmath>

#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

double centered_ss(const std::vector<double>& v) {
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return ss;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately to avoid cancellation near x = 1.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double r_metric(const DnSplit& split) {
  if (split.diurnal.size() != split.nocturnal.size()) {
    throw Error(ErrorCode::LengthMismatch, "D and N differ in length");
  }
  if (split.diurnal.size() < 2) throw Error(ErrorCode::TooShort, "R needs at least two minutes");
  const double den = centered_ss(split.nocturnal);
  if (den == 0.0) return kInfiniteR;
  return centered_ss(split.diurnal) / den;
}

const char* to_string(FlagReason reason) {
  switch (reason) {
    case FlagReason::LowR: return "LowR";
    case FlagReason::SmallImprovement: return "SmallImprovement";
    case FlagReason::Fallback: return "Fallback";
    case FlagReason::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

std::optional<FlagReason> flag_reason_from_string(std::string_view text) {
  for (const auto r : {FlagReason::LowR, FlagReason::SmallImprovement, FlagReason::Fallback, FlagReason::Degenerate}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

std::optional<FlagReason> screen(double r_refined, double r_stc, const ScreenConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be > 0");
  if (r_refined < cfg.epsilon) return FlagReason::LowR;
  if (r_refined - r_stc < cfg.epsilon) return FlagReason::SmallImprovement;
  return std::nullopt;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::DomainError, "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::DomainError, "df must be > 0");
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double two_sided = incomplete_beta_xy(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2));
  return t > 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
}

TTestResult paired_one_sided_t(std::span<const double> pre, std::span<const double> post) {
  if (pre.size() != post.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  if (pre.size() < 2) throw Error(ErrorCode::TooShort, "paired t-test needs n >= 2");

  const std::size_t n = pre.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = post[i] - pre[i];

  TTestResult out;
  out.df = static_cast<int>(n - 1);
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) return out;

  double mean = 0.0;
  for (const double v : d) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double v : d) ss += (v - mean) * (v - mean);
  if (ss == 0.0) throw Error(ErrorCode::ZeroVarianceDifferences, "all paired differences are equal");

  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  out.p_value = student_t_upper_tail(out.t_stat, out.df);
  return out;
}

CohortSummary cohort_summary(std::span<const SubjectReport> reports) {
  if (reports.size() < 2) throw Error(ErrorCode::TooFewSubjects, "cohort needs at least two subjects");

  std::vector<const SubjectReport*> ordered;
  for (const auto& r : reports) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SubjectReport* a, const SubjectReport* b) { return a->subject_id < b->subject_id; });

  CohortSummary out;
  out.subjects = reports.size();
  std::vector<double> pre, post;
  for (const SubjectReport* r : ordered) {
    if (r->flagged) ++out.flagged_count;
    if (std::isinf(r->r_stc) || std::isinf(r->r_refined)) {
      ++out.infinite_count;
      continue;
    }
    out.finite_ids.push_back(r->subject_id);
    out.delta_r.push_back(r->r_refined - r->r_stc);
    pre.push_back(r->r_stc);
    post.push_back(r->r_refined);
  }

  if (pre.size() < 2) {
    out.test_note = "fewer than two finite pairs";
  } else {
    try {
      out.test = paired_one_sided_t(pre, post);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVarianceDifferences) throw;
      out.test_note = "all differences equal";
    }
  }
  return out;
}

}  // namespace sleepwake
