#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mkit {

/// The eight CAN-bus signals a trace may carry.
enum class CanChannel {
  engine_speed,
  fuel_consumed_since_restart,
  odometer,
  accelerator_pedal_position,
  torque_at_transmission,
  steering_wheel_angle,
  vehicle_speed,
  fuel_level,
};

inline constexpr int kNumCanChannels = 8;

const char* name(CanChannel channel);
const char* unit(CanChannel channel);
std::optional<CanChannel> can_channel_from_name(std::string_view name);

inline constexpr std::array<CanChannel, kNumCanChannels> kAllCanChannels = {
    CanChannel::engine_speed,
    CanChannel::fuel_consumed_since_restart,
    CanChannel::odometer,
    CanChannel::accelerator_pedal_position,
    CanChannel::torque_at_transmission,
    CanChannel::steering_wheel_angle,
    CanChannel::vehicle_speed,
    CanChannel::fuel_level,
};

/// Column order of a FrameTable: the 8 CAN channels followed by the 4 GPS
/// channels. Serialized CSV headers use exactly this order.
inline constexpr int kNumFrameColumns = 12;
inline constexpr int kColLatitude = 8;
inline constexpr int kColLongitude = 9;
inline constexpr int kColGroundSpeed = 10;
inline constexpr int kColHeading = 11;

const char* frame_column_name(int index);

enum class ManeuverLabel {
  u_turn,
  left_turn,
  right_turn,
  hard_brake,
  lane_change_left,
  lane_change_right,
  approach_intersection,
};

inline constexpr int kNumLabels = 7;

const char* name(ManeuverLabel label);
std::optional<ManeuverLabel> label_from_name(std::string_view name);

inline constexpr std::array<ManeuverLabel, kNumLabels> kAllLabels = {
    ManeuverLabel::u_turn,
    ManeuverLabel::left_turn,
    ManeuverLabel::right_turn,
    ManeuverLabel::hard_brake,
    ManeuverLabel::lane_change_left,
    ManeuverLabel::lane_change_right,
    ManeuverLabel::approach_intersection,
};

}  // namespace mkit
