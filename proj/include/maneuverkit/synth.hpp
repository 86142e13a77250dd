#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maneuverkit/rng.hpp"
#include "maneuverkit/windows.hpp"

namespace mkit {

/// Seeded synthetic trip generator. Every random draw is scaled by
/// noise_scale, so noise_scale = 0 freezes each class to one canonical
/// trajectory.
struct GeneratorConfig {
  std::uint64_t seed = 42;
  // imbalanced default mix: 25/20/20/15/8/7/5 percent of 700 windows
  std::array<std::size_t, kNumLabels> class_counts = {175, 140, 140,
                                                      105, 56,  49, 35};
  double noise_scale = 1.0;
  double gps_rate_hz = 1.0;
  double can_rate_hz = 10.0;

  std::size_t total() const;
};

struct GeneratedTrip {
  std::string can_trace;  // log-ingest CAN wire format
  std::string gps_log;    // log-ingest GPS wire format
  LabelEvent event;
};

/// One >= 40 s trip whose center realizes the labeled maneuver:
///   u_turn       sustained steering excursion, net heading ~ -180 deg
///   left_turn    ~ -90 deg over a larger radius (smaller peak steering,
///                longer duration) than right_turn (~ +90 deg)
///   hard_brake   accelerator pedal drops to exactly 0 while vehicle and
///                engine speed ramp down rapidly
///   lane changes short mirrored S-shaped steering, ~ 0 net heading
///   approach_intersection  gradual deceleration, small steering
/// Latitude/longitude integrate from ground speed and heading.
GeneratedTrip generate_maneuver(ManeuverLabel label,
                                const GeneratorConfig& config, Rng& rng,
                                double t_start = 1700000000.0);

/// Run generate_maneuver per requested count and pipe each trip through
/// ingest -> sync -> window extraction -> write_subtrip. Returns the
/// sub-trip directories in creation order. Deterministic per seed.
std::vector<std::filesystem::path> generate_dataset(
    const GeneratorConfig& config, const std::filesystem::path& out_dir);

/// JSON form of GeneratorConfig (all fields optional, labels keyed by
/// name under "class_counts").
GeneratorConfig config_from_json(const std::string& text);

}  // namespace mkit
