#pragma once

#include <iosfwd>
#include <vector>

#include "maneuverkit/signal.hpp"

namespace mkit {

struct CanTrace {
  std::vector<SignalSeries> series;  // recognized channels, enum order
  std::size_t unknown_records = 0;   // lines naming channels we don't track
};

/// Parse a CAN trace: one JSON object per line with fields `name` (string),
/// `value` (number) and `timestamp` (number, epoch seconds). Samples are
/// sorted ascending per channel; duplicate timestamps keep the last-seen
/// value; unknown channel names are counted and skipped.
///
/// Throws MalformedRecord (with 1-based line number) or EmptyInput.
CanTrace parse_can_trace(std::istream& in);

/// Inverse of parse_can_trace: emits records merged across channels in
/// ascending time order. Numbers round-trip exactly.
void write_can_trace(const std::vector<SignalSeries>& series,
                     std::ostream& out);

/// Parse a GPS log: CSV with header
/// `timestamp,latitude,longitude,ground_speed,heading`. A
/// `ground_speed_kmh` header selects km/h input, converted to m/s.
/// Fixes are sorted ascending; headings normalized into [0, 360).
///
/// Throws MalformedRecord (with 1-based line number), RangeViolation or
/// EmptyInput.
std::vector<GpsFix> parse_gps_log(std::istream& in);

void write_gps_log(const std::vector<GpsFix>& fixes, std::ostream& out);

}  // namespace mkit
