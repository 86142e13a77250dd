#include "maneuverkit/signal.hpp"

#include <cmath>

#include "maneuverkit/error.hpp"

namespace mkit {

const SignalSeries& validate_series(const SignalSeries& series) {
  if (series.samples.empty()) {
    throw Error(ErrorCode::EmptySeries,
                "series '" + series.name + "' has no samples");
  }
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const SignalSample& s = series.samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.value)) {
      throw Error(ErrorCode::NonFiniteValue,
                  "series '" + series.name + "' non-finite at index " +
                      std::to_string(i));
    }
    if (i > 0 && !(series.samples[i - 1].t < s.t)) {
      throw Error(ErrorCode::NonMonotonicTime,
                  "series '" + series.name +
                      "' time not strictly ascending at index " +
                      std::to_string(i));
    }
  }
  return series;
}

}  // namespace mkit
