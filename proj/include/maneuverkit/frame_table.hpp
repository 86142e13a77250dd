#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "maneuverkit/channels.hpp"

namespace mkit {

/// All channels resampled onto a shared uniform 10 Hz grid. Row i carries
/// timestamp t0 + i * dt with dt fixed at 0.1 s; t0 is always a multiple
/// of 0.1 s.
struct FrameTable {
  double t0 = 0.0;
  double dt = 0.1;
  std::size_t n_rows = 0;
  std::array<std::vector<double>, kNumFrameColumns> columns;

  double time_at(std::size_t row) const;

  std::vector<double>& column(CanChannel ch) {
    return columns[static_cast<int>(ch)];
  }
  const std::vector<double>& column(CanChannel ch) const {
    return columns[static_cast<int>(ch)];
  }

  /// Rows [first, first + count) as a new table.
  FrameTable slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const FrameTable&, const FrameTable&) = default;
};

/// CSV form: header `timestamp,<12 channel names>`, timestamps with one
/// decimal place, values in shortest round-trip notation.
void write_frame_csv(const FrameTable& table, std::ostream& out);
FrameTable read_frame_csv(std::istream& in);

}  // namespace mkit
