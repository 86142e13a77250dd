#include "maneuverkit/channels.hpp"

#include "maneuverkit/error.hpp"

namespace mkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::GridOutOfRange: return "GridOutOfRange";
    case ErrorCode::MissingChannel: return "MissingChannel";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::LabelUnknown: return "LabelUnknown";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
  }
  return "Unknown";
}

const char* name(CanChannel channel) {
  switch (channel) {
    case CanChannel::engine_speed: return "engine_speed";
    case CanChannel::fuel_consumed_since_restart:
      return "fuel_consumed_since_restart";
    case CanChannel::odometer: return "odometer";
    case CanChannel::accelerator_pedal_position:
      return "accelerator_pedal_position";
    case CanChannel::torque_at_transmission: return "torque_at_transmission";
    case CanChannel::steering_wheel_angle: return "steering_wheel_angle";
    case CanChannel::vehicle_speed: return "vehicle_speed";
    case CanChannel::fuel_level: return "fuel_level";
  }
  return "";
}

const char* unit(CanChannel channel) {
  switch (channel) {
    case CanChannel::engine_speed: return "RPM";
    case CanChannel::fuel_consumed_since_restart: return "L";
    case CanChannel::odometer: return "km";
    case CanChannel::accelerator_pedal_position: return "%";
    case CanChannel::torque_at_transmission: return "N*m";
    case CanChannel::steering_wheel_angle: return "deg";  // left positive
    case CanChannel::vehicle_speed: return "km/h";
    case CanChannel::fuel_level: return "%";
  }
  return "";
}

std::optional<CanChannel> can_channel_from_name(std::string_view name) {
  for (CanChannel ch : kAllCanChannels) {
    if (name == mkit::name(ch)) return ch;
  }
  return std::nullopt;
}

const char* frame_column_name(int index) {
  if (index < kNumCanChannels) return name(static_cast<CanChannel>(index));
  switch (index) {
    case kColLatitude: return "latitude";
    case kColLongitude: return "longitude";
    case kColGroundSpeed: return "ground_speed";
    case kColHeading: return "heading";
  }
  return "";
}

const char* name(ManeuverLabel label) {
  switch (label) {
    case ManeuverLabel::u_turn: return "u_turn";
    case ManeuverLabel::left_turn: return "left_turn";
    case ManeuverLabel::right_turn: return "right_turn";
    case ManeuverLabel::hard_brake: return "hard_brake";
    case ManeuverLabel::lane_change_left: return "lane_change_left";
    case ManeuverLabel::lane_change_right: return "lane_change_right";
    case ManeuverLabel::approach_intersection: return "approach_intersection";
  }
  return "";
}

std::optional<ManeuverLabel> label_from_name(std::string_view name) {
  for (ManeuverLabel label : kAllLabels) {
    if (name == mkit::name(label)) return label;
  }
  return std::nullopt;
}

}  // namespace mkit
