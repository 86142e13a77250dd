#pragma once

#include <vector>

#include "maneuverkit/frame_table.hpp"
#include "maneuverkit/signal.hpp"

namespace mkit {

/// Map an angle onto [0, 360).
double wrap_360(double degrees);

/// Lift wrapped angles to a continuous sequence: output[0] = input[0] and
/// every successive step lies in (-180, 180]. Wrapping the output modulo
/// 360 recovers the input.
std::vector<double> unwrap_angle(const std::vector<double>& degrees);

/// Fuse CAN series and GPS fixes onto one uniform 10 Hz grid spanning the
/// intersection of their coverage, t0 rounded up to the next 0.1 s
/// multiple. Every column goes through the natural cubic spline; heading
/// is unwrapped first and re-wrapped after; ground speed is clamped at 0.
///
/// Throws MissingChannel, InsufficientOverlap (< 1 s of common coverage)
/// or TooFewSamples.
FrameTable align_streams(const std::vector<SignalSeries>& can,
                         const std::vector<GpsFix>& gps);

}  // namespace mkit
