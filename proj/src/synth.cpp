#include "maneuverkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "maneuverkit/error.hpp"
#include "maneuverkit/features.hpp"
#include "maneuverkit/ingest.hpp"
#include "maneuverkit/timesync.hpp"

namespace mkit {

namespace {

using nlohmann::json;

constexpr double kTripSeconds = 44.0;
constexpr double kManeuverCenter = 22.0;  // label lands here
constexpr double kSimDt = 0.01;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kEarthRadius = 6371000.0;  // m
constexpr double kSteerRatio = 14.0;        // wheel angle per road-wheel angle
constexpr double kWheelBase = 2.7;          // m

/// All per-trip randomness, drawn in one fixed order for every label so
/// that equal seeds stay comparable across labels (and noise_scale = 0
/// freezes each class to a single trajectory).
struct TripParams {
  double cruise_speed;     // m/s
  double turn_speed;       // m/s floor during turning maneuvers
  double turn_heading;     // net heading change, deg (sign = direction)
  double turn_duration;    // s
  double lane_amplitude;   // deg of heading deviation for lane changes
  double lane_duration;    // s
  double label_offset;     // co-pilot timing error, s
  double heading0;         // deg
  double lat0, lon0;
  double fuel_consumed0;   // L since restart at trip start
  double odometer0;        // km
  double fuel_level0;      // %
  double weave_amp[3], weave_freq[3], weave_phase[3];  // deg/s, Hz, rad
};

TripParams draw_params(ManeuverLabel label, double ns, Rng& rng) {
  TripParams p{};
  auto jitter = [&](double spread) { return ns * spread * rng.uniform(-1.0, 1.0); };

  p.cruise_speed = 13.0 + jitter(1.5);
  p.label_offset = jitter(0.25);
  p.heading0 = ns * rng.uniform(0.0, 360.0);
  p.lat0 = 28.60 + jitter(0.02);
  p.lon0 = -81.20 + jitter(0.02);
  p.fuel_consumed0 = 0.8 + ns * rng.uniform(0.0, 1.5);
  p.odometer0 = 2500.0 + ns * rng.uniform(0.0, 2000.0);
  p.fuel_level0 = 60.0 + jitter(18.0);
  for (int i = 0; i < 3; ++i) {
    p.weave_amp[i] = 0.3 + ns * rng.uniform(0.0, 0.4);      // deg/s
    p.weave_freq[i] = 0.06 + ns * rng.uniform(0.0, 0.14);   // Hz
    p.weave_phase[i] = ns * rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  // turn family draws (consumed by every label to keep streams aligned)
  const double turn_jitter_h = jitter(5.0);
  const double turn_jitter_d = jitter(0.35);
  const double turn_jitter_v = jitter(0.4);
  const double u_jitter_h = jitter(8.0);
  const double u_jitter_d = jitter(0.7);
  p.lane_amplitude = 7.0 + jitter(1.5);
  p.lane_duration = 4.0 + jitter(0.5);

  switch (label) {
    case ManeuverLabel::u_turn:
      p.turn_heading = -180.0 + u_jitter_h;
      p.turn_duration = 8.0 + u_jitter_d;
      p.turn_speed = 3.0 + turn_jitter_v;
      break;
    case ManeuverLabel::left_turn:
      // larger radius than the right turn: slower rotation, longer arc
      p.turn_heading = -90.0 + turn_jitter_h;
      p.turn_duration = 6.5 + turn_jitter_d;
      p.turn_speed = 6.0 + turn_jitter_v;
      break;
    case ManeuverLabel::right_turn:
      p.turn_heading = 90.0 + turn_jitter_h;
      p.turn_duration = 4.5 + turn_jitter_d;
      p.turn_speed = 5.0 + turn_jitter_v;
      break;
    default:
      p.turn_heading = 0.0;
      p.turn_duration = 6.0;
      p.turn_speed = p.cruise_speed;
      break;
  }
  return p;
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// 1 inside [t0, t1] with smooth ramps of the given width on both sides.
double plateau(double t, double t0, double t1, double ramp) {
  return smoothstep((t - t0) / ramp + 1.0) - smoothstep((t - t1) / ramp);
}

/// Continuous trip state on the dense simulation grid.
struct Sim {
  std::vector<double> t;  // relative seconds
  std::vector<double> speed, accel, heading, pedal, lat, lon;
  std::vector<double> fuel_consumed, odometer;
};

Sim simulate(ManeuverLabel label, const TripParams& p, double ns) {
  const std::size_t n = static_cast<std::size_t>(kTripSeconds / kSimDt) + 1;
  Sim sim;
  sim.t.resize(n);
  sim.speed.resize(n);
  sim.accel.resize(n);
  sim.heading.resize(n);
  sim.pedal.resize(n);
  sim.lat.resize(n);
  sim.lon.resize(n);
  sim.fuel_consumed.resize(n);
  sim.odometer.resize(n);

  const double tc = kManeuverCenter;

  // speed profile
  auto speed_at = [&](double t) -> double {
    switch (label) {
      case ManeuverLabel::u_turn:
      case ManeuverLabel::left_turn:
      case ManeuverLabel::right_turn: {
        const double lo = tc - p.turn_duration / 2.0;
        const double hi = tc + p.turn_duration / 2.0;
        const double drop =
            (p.cruise_speed - p.turn_speed) * plateau(t, lo - 1.0, hi + 0.5, 2.5);
        return p.cruise_speed - drop;
      }
      case ManeuverLabel::hard_brake: {
        const double vc = p.cruise_speed + 2.0;  // brakes bite from pace
        const double t_brake = tc - 1.0;
        const double decel = 6.0;
        const double t_stop = t_brake + vc / decel;
        const double hold = 8.0;
        const double t_go = t_stop + hold;
        if (t < t_brake) return vc;
        if (t < t_stop) return vc - decel * (t - t_brake);
        if (t < t_go) return 0.0;
        return std::min(vc, 2.0 * (t - t_go));
      }
      case ManeuverLabel::approach_intersection: {
        const double v_min = 1.5;
        const double t_dec = tc - 6.0;
        const double decel = 1.2;
        const double t_reach = t_dec + (p.cruise_speed - v_min) / decel;
        const double hold = 3.0;
        const double t_go = t_reach + hold;
        if (t < t_dec) return p.cruise_speed;
        if (t < t_reach) return p.cruise_speed - decel * (t - t_dec);
        if (t < t_go) return v_min;
        return std::min(p.cruise_speed, v_min + 1.5 * (t - t_go));
      }
      default:
        return p.cruise_speed;  // lane changes hold pace
    }
  };

  // heading rate, deg/s (compass convention: right turns increase heading)
  auto heading_rate_at = [&](double t) -> double {
    double rate = 0.0;
    switch (label) {
      case ManeuverLabel::u_turn:
      case ManeuverLabel::left_turn:
      case ManeuverLabel::right_turn: {
        const double ts = tc - p.turn_duration / 2.0;
        const double u = (t - ts) / p.turn_duration;
        if (u > 0.0 && u < 1.0) {
          rate += p.turn_heading / p.turn_duration *
                  (1.0 - std::cos(2.0 * std::numbers::pi * u));
        }
        break;
      }
      case ManeuverLabel::lane_change_left:
      case ManeuverLabel::lane_change_right: {
        const double sign =
            label == ManeuverLabel::lane_change_left ? -1.0 : 1.0;
        const double ts = tc - p.lane_duration / 2.0;
        const double u = (t - ts) / p.lane_duration;
        if (u > 0.0 && u < 1.0) {
          // deviation bump: heading swings out and returns, zero net change
          rate += sign * p.lane_amplitude * std::numbers::pi /
                  p.lane_duration * std::sin(2.0 * std::numbers::pi * u);
        }
        break;
      }
      default:
        break;
    }
    for (int i = 0; i < 3; ++i) {
      rate += ns * p.weave_amp[i] *
              std::sin(2.0 * std::numbers::pi * p.weave_freq[i] * t +
                       p.weave_phase[i]);
    }
    return rate;
  };

  double heading = p.heading0;
  double lat = p.lat0, lon = p.lon0;
  double fuel = p.fuel_consumed0;
  double dist_km = p.odometer0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * kSimDt;
    sim.t[i] = t;
    const double v = speed_at(t);
    sim.speed[i] = v;
    const double dv = (speed_at(t + kSimDt) - v) / kSimDt;
    sim.accel[i] = dv;
    sim.heading[i] = heading;
    sim.lat[i] = lat;
    sim.lon[i] = lon;
    sim.fuel_consumed[i] = fuel;
    sim.odometer[i] = dist_km;

    // accelerator pedal: off while slowing, otherwise tracks demand
    double pedal = 0.0;
    if (dv >= -0.35) {
      pedal = 12.0 + 1.1 * (v - 11.0) + 16.0 * std::max(0.0, dv);
      pedal = std::clamp(pedal, 0.0, 100.0);
      if (v < 0.3) pedal = 0.0;  // stopped
    }
    sim.pedal[i] = pedal;

    heading += heading_rate_at(t) * kSimDt;
    const double h_rad = heading * kDegToRad;
    lat += v * std::cos(h_rad) / kEarthRadius / kDegToRad * kSimDt;
    lon += v * std::sin(h_rad) / (kEarthRadius * std::cos(lat * kDegToRad)) /
           kDegToRad * kSimDt;
    fuel += (0.00022 + 0.000028 * pedal) * kSimDt;
    dist_km += v * kSimDt / 1000.0;
  }
  return sim;
}

double interp(const std::vector<double>& t, const std::vector<double>& y,
              double q) {
  if (q <= t.front()) return y.front();
  if (q >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), q);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (q - t[i]) / (t[i + 1] - t[i]);
  return y[i] + w * (y[i + 1] - y[i]);
}

}  // namespace

std::size_t GeneratorConfig::total() const {
  std::size_t sum = 0;
  for (std::size_t c : class_counts) sum += c;
  return sum;
}

GeneratedTrip generate_maneuver(ManeuverLabel label,
                                const GeneratorConfig& config, Rng& rng,
                                double t_start) {
  const double ns = config.noise_scale;
  const TripParams p = draw_params(label, ns, rng);
  const Sim sim = simulate(label, p, ns);

  // timestamps ride on exact 0.1 s ticks (plus jitter) so that a quiet
  // generator lands every sample on the output grid
  const long long tick_start = std::llround(t_start * 10.0);

  auto can_value = [&](CanChannel ch, double tau) -> double {
    switch (ch) {
      case CanChannel::engine_speed: {
        const double v = interp(sim.t, sim.speed, tau);
        return 780.0 + v * 3.6 * 42.0 + ns * rng.normal(0.0, 25.0);
      }
      case CanChannel::fuel_consumed_since_restart:
        return interp(sim.t, sim.fuel_consumed, tau) +
               ns * rng.normal(0.0, 0.0004);
      case CanChannel::odometer:
        return interp(sim.t, sim.odometer, tau) + ns * rng.normal(0.0, 0.002);
      case CanChannel::accelerator_pedal_position: {
        const double raw = interp(sim.t, sim.pedal, tau);
        if (raw <= 0.0) return 0.0;  // foot fully off reads an exact zero
        return std::clamp(raw + ns * rng.normal(0.0, 1.2), 0.0, 100.0);
      }
      case CanChannel::torque_at_transmission: {
        const double pedal = interp(sim.t, sim.pedal, tau);
        const double accel = interp(sim.t, sim.accel, tau);
        return 20.0 + 2.5 * pedal + 30.0 * accel + ns * rng.normal(0.0, 4.0);
      }
      case CanChannel::steering_wheel_angle: {
        // Ackermann-style wheel angle from the commanded yaw rate; compass
        // heading increases clockwise, steering is signed left-positive
        const double dh = (interp(sim.t, sim.heading, tau + kSimDt) -
                           interp(sim.t, sim.heading, tau)) /
                          kSimDt;                       // deg/s
        const double omega = -dh * kDegToRad;           // rad/s, ccw positive
        const double v = std::max(1.0, interp(sim.t, sim.speed, tau));
        const double wheel =
            kSteerRatio * std::atan(kWheelBase * omega / v) / kDegToRad;
        return wheel + ns * rng.normal(0.0, 1.2);
      }
      case CanChannel::vehicle_speed:
        return std::max(
            0.0, interp(sim.t, sim.speed, tau) * 3.6 + ns * rng.normal(0.0, 0.35));
      case CanChannel::fuel_level:
        return p.fuel_level0 -
               (interp(sim.t, sim.fuel_consumed, tau) - p.fuel_consumed0) /
                   45.0 * 100.0 +
               ns * rng.normal(0.0, 0.15);
    }
    return 0.0;
  };

  // CAN sampling: per channel on the nominal 10 Hz clock with jitter
  std::vector<SignalSeries> series;
  const double can_step = 1.0 / config.can_rate_hz;
  const std::size_t can_samples =
      static_cast<std::size_t>(kTripSeconds / can_step) + 1;
  for (CanChannel ch : kAllCanChannels) {
    SignalSeries s{name(ch), unit(ch), {}};
    s.samples.reserve(can_samples);
    for (std::size_t k = 0; k < can_samples; ++k) {
      const double jit = ns * rng.uniform(-0.004, 0.004);
      double t_abs, tau;
      if (config.can_rate_hz == 10.0) {
        t_abs = static_cast<double>(tick_start + static_cast<long long>(k)) /
                    10.0 + jit;
        tau = static_cast<double>(k) * 0.1 + jit;
      } else {
        tau = static_cast<double>(k) * can_step + jit;
        t_abs = static_cast<double>(tick_start) / 10.0 + tau;
      }
      s.samples.push_back({t_abs, can_value(ch, tau)});
    }
    series.push_back(std::move(s));
  }

  // GPS sampling near 1 Hz with interval jitter
  std::vector<GpsFix> fixes;
  double tau = 0.0;
  while (tau <= kTripSeconds) {
    GpsFix fix;
    fix.t = static_cast<double>(tick_start) / 10.0 + tau;
    fix.latitude = interp(sim.t, sim.lat, tau) + ns * rng.normal(0.0, 1.5e-6);
    fix.longitude = interp(sim.t, sim.lon, tau) + ns * rng.normal(0.0, 1.5e-6);
    fix.ground_speed =
        std::max(0.0, interp(sim.t, sim.speed, tau) + ns * rng.normal(0.0, 0.12));
    fix.heading =
        wrap_360(interp(sim.t, sim.heading, tau) + ns * rng.normal(0.0, 0.7));
    fixes.push_back(fix);
    tau += 1.0 / config.gps_rate_hz * (1.0 + 0.15 * ns * rng.uniform(-1.0, 1.0));
  }

  GeneratedTrip trip;
  {
    std::ostringstream can_out;
    write_can_trace(series, can_out);
    trip.can_trace = can_out.str();
  }
  {
    std::ostringstream gps_out;
    write_gps_log(fixes, gps_out);
    trip.gps_log = gps_out.str();
  }
  trip.event.label = label;
  trip.event.t_label =
      static_cast<double>(tick_start) / 10.0 + kManeuverCenter + p.label_offset;
  return trip;
}

std::vector<std::filesystem::path> generate_dataset(
    const GeneratorConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure,
                "cannot create '" + out_dir.string() + "': " + ec.message());
  }

  std::vector<std::filesystem::path> dirs;
  std::size_t instance = 0;
  const double base_start = 1700000000.0;
  for (ManeuverLabel label : kAllLabels) {
    const std::size_t count = config.class_counts[static_cast<int>(label)];
    for (std::size_t c = 0; c < count; ++c, ++instance) {
      Rng rng(derive_seed(config.seed, instance));
      const double t_start =
          base_start + static_cast<double>(instance) * 100.0;
      const GeneratedTrip trip =
          generate_maneuver(label, config, rng, t_start);

      std::istringstream can_in(trip.can_trace);
      const CanTrace can = parse_can_trace(can_in);
      std::istringstream gps_in(trip.gps_log);
      const std::vector<GpsFix> gps = parse_gps_log(gps_in);
      const FrameTable table = align_streams(can.series, gps);
      const WindowExtraction extraction =
          extract_windows(table, {trip.event});
      if (extraction.windows.size() != 1) {
        throw Error(ErrorCode::IoFailure,
                    "generated trip did not yield exactly one window");
      }
      dirs.push_back(write_subtrip(extraction.windows.front(), out_dir));
    }
  }
  return dirs;
}

GeneratorConfig config_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::MalformedRecord, "generator config is not JSON");
  }
  GeneratorConfig config;
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("noise_scale")) {
    config.noise_scale = j.at("noise_scale").get<double>();
    if (config.noise_scale < 0.0) {
      throw Error(ErrorCode::RangeViolation, "noise_scale must be >= 0");
    }
  }
  if (j.contains("gps_rate_hz")) {
    config.gps_rate_hz = j.at("gps_rate_hz").get<double>();
  }
  if (j.contains("can_rate_hz")) {
    config.can_rate_hz = j.at("can_rate_hz").get<double>();
  }
  if (config.gps_rate_hz <= 0.0 || config.can_rate_hz <= 0.0) {
    throw Error(ErrorCode::RangeViolation, "sample rates must be positive");
  }
  if (j.contains("class_counts")) {
    const json& counts = j.at("class_counts");
    if (!counts.is_object()) {
      throw Error(ErrorCode::MalformedRecord,
                  "class_counts must map label names to counts");
    }
    for (const auto& [key, value] : counts.items()) {
      const auto label = label_from_name(key);
      if (!label) {
        throw Error(ErrorCode::LabelUnknown,
                    "unknown label '" + key + "' in class_counts");
      }
      config.class_counts[static_cast<int>(*label)] =
          value.get<std::size_t>();
    }
  }
  return config;
}

}  // namespace mkit
