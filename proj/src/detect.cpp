#include "sleepwake/detect.hpp"

#include <algorithm>

#include "sleepwake/error.hpp"

namespace sleepwake {

namespace {

void check_alternating(const CpSet& cps, std::size_t n) {
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].index < 1 || cps[i].index > n) {
      throw Error(ErrorCode::InvalidConfig, "change point index outside [1, n]");
    }
    if (i == 0) continue;
    if (cps[i].index <= cps[i - 1].index) throw Error(ErrorCode::InvalidConfig, "change points not increasing");
    if (cps[i].kind == cps[i - 1].kind) {
      throw Error(ErrorCode::NonAlternatingKinds, "two consecutive " + std::string(to_string(cps[i].kind)));
    }
  }
}

}  // namespace

const char* to_string(OnsetKind kind) {
  return kind == OnsetKind::WakeOnset ? "WakeOnset" : "SleepOnset";
}

const char* to_string(CpSource source) {
  switch (source) {
    case CpSource::STC: return "STC";
    case CpSource::PELT: return "PELT";
    case CpSource::Fallback: return "Fallback";
  }
  return "Unknown";
}

CpSet refine_change_points(const EpochSeries& series, const CpSet& cp_stc, const DetectConfig& cfg) {
  const std::size_t n = series.size();
  if (cp_stc.size() < 3) throw Error(ErrorCode::TooFewTransitions, std::to_string(cp_stc.size()) + " transitions");
  check_alternating(cp_stc, n);

  const std::vector<double> shifted = shift_zeros(series.counts, cfg.zero_shift);
  const std::size_t m = cp_stc.size();

  CpSet refined;
  refined.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Inclusive 1-based region [first, last]; a result k maps to onset first + k.
    const std::size_t first = i == 0 ? 1 : refined.back().index;
    const std::size_t last = i + 1 < m ? cp_stc[i + 1].index : n;
    const std::size_t coarse = cp_stc[i].index;

    ChangePoint cp{std::clamp(coarse, first + 1, last - 1), cp_stc[i].kind, CpSource::Fallback};
    const std::size_t len = last - first + 1;
    if (len >= 2 * kMinSegmentLength) {
      const std::span<const double> region(shifted.data() + (first - 1), len);
      const std::size_t anchor = std::clamp<std::size_t>(coarse > first ? coarse - first : 1, 1, len);
      try {
        const SingleCpResult hit = single_cp_search(region, anchor, cfg.schedule);
        cp.index = first + hit.index;
        cp.source = CpSource::PELT;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoChangePointFound) throw;
      }
    }
    refined.push_back(cp);
  }
  return refined;
}

LabelBuild build_label_vector(std::size_t n, const CpSet& cps) {
  LabelBuild out;
  out.labels.assign(n, 0);
  if (cps.empty()) {
    out.degenerate = true;
    return out;
  }
  check_alternating(cps, n);

  std::uint8_t state = cps.front().kind == OnsetKind::WakeOnset ? 0 : 1;
  std::size_t next = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    if (next < cps.size() && cps[next].index == t) {
      state = cps[next].kind == OnsetKind::WakeOnset ? 1 : 0;
      ++next;
    }
    out.labels[t - 1] = state;
  }
  return out;
}

DnSplit split_dn(std::span<const double> counts, const LabelVector& labels) {
  if (counts.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "counts and labels differ in length");
  DnSplit out;
  out.diurnal.resize(counts.size());
  out.nocturnal.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double l = labels[i];
    out.diurnal[i] = l * counts[i];
    out.nocturnal[i] = (1.0 - l) * counts[i];
  }
  return out;
}

}  // namespace sleepwake
