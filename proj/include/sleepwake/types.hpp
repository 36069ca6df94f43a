#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sleepwake {

enum class OnsetKind : std::uint8_t { WakeOnset, SleepOnset };
enum class CpSource : std::uint8_t { STC, PELT, Fallback };

// A change point is the first minute (1-based) of the new state: a WakeOnset at
// index t means L[t] = 1 and L[t-1] = 0.
struct ChangePoint {
  std::size_t index = 0;
  OnsetKind kind = OnsetKind::WakeOnset;
  CpSource source = CpSource::STC;

  friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

using CpSet = std::vector<ChangePoint>;

// Per-minute awake (1) / asleep (0) labels; element i holds minute t = i + 1.
using LabelVector = std::vector<std::uint8_t>;

const char* to_string(OnsetKind kind);
const char* to_string(CpSource source);

}  // namespace sleepwake
