#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "maneuverkit/windows.hpp"

namespace mkit {

inline constexpr int kNumFeatures = 60;

struct FeatureVector {
  std::vector<double> values;  // length kNumFeatures
  ManeuverLabel label = ManeuverLabel::u_turn;
};

struct Dataset {
  std::vector<FeatureVector> rows;
  std::vector<std::string> feature_names;
  std::array<std::size_t, kNumLabels> class_counts{};

  /// Labels with at least one row, in enumeration order.
  std::vector<ManeuverLabel> class_list() const;
};

/// The fixed feature layout: for each of 10 channels (8 CAN channels plus
/// ground_speed and heading_delta) the 6 statistics mean, population std,
/// min, max, last-minus-first and max-minus-min, channel-major. Latitude
/// and longitude never appear.
const std::vector<std::string>& feature_names();

/// heading_delta is the unwrapped heading minus its value at the window
/// start, so the statistics see net rotation rather than absolute compass
/// direction.
FeatureVector featurize_window(const ManeuverWindow& window);

Dataset build_dataset(const std::vector<ManeuverWindow>& windows);

/// CSV form: 60 feature-name columns plus `label`.
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace mkit
