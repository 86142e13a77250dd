#pragma once

#include <string>
#include <vector>

#include "maneuverkit/channels.hpp"

namespace mkit {

struct SignalSample {
  double t = 0.0;  // seconds since epoch
  double value = 0.0;

  friend bool operator==(const SignalSample&, const SignalSample&) = default;
};

/// One named telemetry channel. Samples are strictly ascending in time
/// after validation.
struct SignalSeries {
  std::string name;
  std::string unit;
  std::vector<SignalSample> samples;

  friend bool operator==(const SignalSeries&, const SignalSeries&) = default;
};

struct GpsFix {
  double t = 0.0;
  double latitude = 0.0;   // deg, [-90, 90]
  double longitude = 0.0;  // deg, [-180, 180]
  double ground_speed = 0.0;  // m/s, >= 0
  double heading = 0.0;       // deg, [0, 360)

  friend bool operator==(const GpsFix&, const GpsFix&) = default;
};

/// Returns the series unchanged when all invariants hold. Throws
/// EmptySeries, NonMonotonicTime or NonFiniteValue (citing the offending
/// sample index) otherwise.
const SignalSeries& validate_series(const SignalSeries& series);

}  // namespace mkit
