#include "sleepwake/cpd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

class PrefixCost {
 public:
  PrefixCost(std::span<const double> x, double alpha) : alpha_(alpha), sum_(x.size() + 1, 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) sum_[i + 1] = sum_[i] + x[i];
  }

  // Cost of samples (from, to], i.e. 0-based [from, to).
  double operator()(std::size_t from, std::size_t to) const {
    const auto len = static_cast<double>(to - from);
    return 2.0 * len * alpha_ * std::log((sum_[to] - sum_[from]) / len);
  }

 private:
  double alpha_;
  std::vector<double> sum_;
};

void require_positive(std::span<const double> x) {
  for (const double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NonPositiveSample, "gamma cost needs x > 0");
  }
}

}  // namespace

std::vector<double> shift_zeros(std::span<const double> x, double zero_shift) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return std::max(v, zero_shift); });
  return out;
}

double gamma_segment_cost(std::span<const double> x, double shape_alpha) {
  if (x.empty()) throw Error(ErrorCode::TooShort, "empty segment");
  require_positive(x);
  double sum = 0.0;
  for (const double v : x) sum += v;
  const auto n = static_cast<double>(x.size());
  return 2.0 * n * shape_alpha * std::log(sum / n);
}

double estimate_shape(std::span<const double> x) {
  if (x.size() < 2) throw Error(ErrorCode::TooShort, "shape estimate needs two samples");
  require_positive(x);
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / n;
  if (var <= 0.0) throw Error(ErrorCode::ZeroVariance, "constant segment");
  return std::clamp(mean * mean / var, 0.05, 100.0);
}

CpSearchResult pelt(std::span<const double> x, double penalty, double shape_alpha) {
  if (x.empty()) throw Error(ErrorCode::TooShort, "empty series");
  if (!(penalty >= 0.0)) throw Error(ErrorCode::InvalidConfig, "penalty must be >= 0");
  if (!(shape_alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "shape must be > 0");
  require_positive(x);

  const std::size_t n = x.size();
  const PrefixCost cost(x, shape_alpha);
  CpSearchResult result;
  result.penalty_used = penalty;

  if (std::isinf(penalty) || n < 2 * kMinSegmentLength) {
    result.total_cost = cost(0, n);
    return result;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, kInf);
  std::vector<std::size_t> last(n + 1, 0);
  best[0] = -penalty;

  struct Candidate {
    std::size_t tau;
    std::size_t expires;  // removed once t >= expires
  };
  std::vector<Candidate> candidates{{0, n + 1}};
  std::vector<double> values;

  for (std::size_t t = kMinSegmentLength; t <= n; ++t) {
    std::erase_if(candidates, [&](const Candidate& c) { return c.expires <= t; });

    values.assign(candidates.size(), kInf);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t tau = candidates[i].tau;
      if (t - tau < kMinSegmentLength) continue;
      values[i] = best[tau] + cost(tau, t) + penalty;
      if (values[i] < best[t]) {
        best[t] = values[i];
        last[t] = tau;
      }
    }

    // tau can never beat t as the last change point once (t, t'] is a legal segment.
    const double slack = 1e-10 * (1.0 + std::abs(best[t]));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (std::isfinite(values[i]) && values[i] - penalty > best[t] + slack) {
        candidates[i].expires = std::min(candidates[i].expires, t + kMinSegmentLength);
      }
    }
    candidates.push_back({t, n + 1});
  }

  for (std::size_t t = last[n]; t > 0; t = last[t]) result.change_points.push_back(t);
  std::reverse(result.change_points.begin(), result.change_points.end());

  std::size_t from = 0;
  for (const std::size_t cp : result.change_points) {
    result.total_cost += cost(from, cp);
    from = cp;
  }
  result.total_cost += cost(from, n);
  return result;
}

SingleCpResult single_cp_search(std::span<const double> region, std::size_t anchor, const ScheduleConfig& cfg) {
  if (region.size() < 2 * kMinSegmentLength) {
    throw Error(ErrorCode::RegionTooShort, "region needs at least 4 samples");
  }
  if (anchor < 1 || anchor > region.size()) throw Error(ErrorCode::InvalidConfig, "anchor outside region");

  double alpha = 0.0;
  try {
    alpha = estimate_shape(region);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
    throw Error(ErrorCode::NoChangePointFound, "flat region");
  }

  const double log_n = std::log(static_cast<double>(region.size()));
  const double floor = cfg.floor_scale * log_n;
  double penalty = cfg.initial_scale * alpha * log_n;

  SingleCpResult out;
  out.shape_alpha = alpha;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    const bool at_floor = penalty <= floor;
    if (at_floor) penalty = floor;
    const CpSearchResult found = pelt(region, penalty, alpha);
    out.iterations = k + 1;
    if (!found.change_points.empty()) {
      const auto distance = [&](std::size_t cp) { return cp > anchor ? cp - anchor : anchor - cp; };
      // change_points is ascending, so min_element keeps the earlier one on ties.
      out.index = *std::min_element(found.change_points.begin(), found.change_points.end(),
                                    [&](std::size_t a, std::size_t b) { return distance(a) < distance(b); });
      out.penalty_used = penalty;
      return out;
    }
    if (at_floor) break;
    penalty *= cfg.decay;
  }
  throw Error(ErrorCode::NoChangePointFound, "penalty schedule exhausted");
}

}  // namespace sleepwake
