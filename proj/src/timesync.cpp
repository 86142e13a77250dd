#include "maneuverkit/timesync.hpp"

#include <algorithm>
#include <cmath>

#include "maneuverkit/error.hpp"
#include "maneuverkit/spline.hpp"

namespace mkit {

double wrap_360(double degrees) {
  double w = std::fmod(degrees, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

std::vector<double> unwrap_angle(const std::vector<double>& degrees) {
  if (degrees.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot unwrap an empty sequence");
  }
  std::vector<double> out;
  out.reserve(degrees.size());
  // carry the 360-degree offset as an integer so that wrapping the output
  // modulo 360 recovers the input
  long long k = 0;
  out.push_back(degrees[0]);
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    const double d = degrees[i] - degrees[i - 1];
    long long step = -static_cast<long long>(std::floor((d + 180.0) / 360.0));
    if (d + 360.0 * static_cast<double>(step) == -180.0) step += 1;
    k += step;
    out.push_back(degrees[i] + 360.0 * static_cast<double>(k));
  }
  return out;
}

namespace {

const SignalSeries* find_channel(const std::vector<SignalSeries>& can,
                                 CanChannel ch) {
  for (const SignalSeries& s : can) {
    if (s.name == name(ch)) return &s;
  }
  return nullptr;
}

}  // namespace

FrameTable align_streams(const std::vector<SignalSeries>& can,
                         const std::vector<GpsFix>& gps) {
  std::array<const SignalSeries*, kNumCanChannels> channel{};
  for (CanChannel ch : kAllCanChannels) {
    const SignalSeries* s = find_channel(can, ch);
    if (!s) {
      throw Error(ErrorCode::MissingChannel,
                  std::string("CAN channel '") + name(ch) + "' missing");
    }
    if (s->samples.size() < 4) {
      throw Error(ErrorCode::TooFewSamples,
                  std::string("CAN channel '") + name(ch) + "' has " +
                      std::to_string(s->samples.size()) +
                      " samples, need >= 4");
    }
    channel[static_cast<int>(ch)] = s;
  }
  if (gps.size() < 4) {
    throw Error(ErrorCode::TooFewSamples,
                "GPS stream has " + std::to_string(gps.size()) +
                    " fixes, need >= 4");
  }

  double start = gps.front().t;
  double end = gps.back().t;
  for (const SignalSeries* s : channel) {
    start = std::max(start, s->samples.front().t);
    end = std::min(end, s->samples.back().t);
  }
  if (end - start < 1.0) {
    throw Error(ErrorCode::InsufficientOverlap,
                "CAN and GPS coverage overlap by less than 1 s");
  }

  // grid anchored at epoch multiples of 0.1 s, inside both coverages
  const long long tick0 = static_cast<long long>(std::ceil(start * 10.0 - 1e-9));
  const long long tick1 = static_cast<long long>(std::floor(end * 10.0 + 1e-9));
  const std::size_t n_rows = static_cast<std::size_t>(tick1 - tick0 + 1);
  std::vector<double> grid(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    grid[i] = static_cast<double>(tick0 + static_cast<long long>(i)) / 10.0;
  }

  FrameTable table;
  table.t0 = static_cast<double>(tick0) / 10.0;
  table.n_rows = n_rows;

  for (CanChannel ch : kAllCanChannels) {
    table.column(ch) = resample_cubic(*channel[static_cast<int>(ch)], grid);
  }

  std::vector<double> t, lat, lon, speed, heading;
  t.reserve(gps.size());
  for (const GpsFix& fix : gps) {
    t.push_back(fix.t);
    lat.push_back(fix.latitude);
    lon.push_back(fix.longitude);
    speed.push_back(fix.ground_speed);
    heading.push_back(fix.heading);
  }
  table.columns[kColLatitude] = resample_cubic(t, lat, grid);
  table.columns[kColLongitude] = resample_cubic(t, lon, grid);
  table.columns[kColGroundSpeed] = resample_cubic(t, speed, grid);
  for (double& v : table.columns[kColGroundSpeed]) v = std::max(v, 0.0);

  // heading is circular: unwrap so the spline cannot shortcut across north
  const std::vector<double> unwrapped = unwrap_angle(heading);
  table.columns[kColHeading] = resample_cubic(t, unwrapped, grid);
  for (double& v : table.columns[kColHeading]) v = wrap_360(v);

  return table;
}

}  // namespace mkit
