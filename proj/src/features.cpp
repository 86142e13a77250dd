#include "maneuverkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "io_util.hpp"
#include "maneuverkit/error.hpp"
#include "maneuverkit/timesync.hpp"

namespace mkit {

namespace {

constexpr int kNumSourceChannels = 10;  // 8 CAN + ground_speed + heading_delta
constexpr int kStatsPerChannel = 6;

const char* source_channel_name(int i) {
  if (i < kNumCanChannels) return name(static_cast<CanChannel>(i));
  return i == 8 ? "ground_speed" : "heading_delta";
}

constexpr std::array<const char*, kStatsPerChannel> kStatNames = {
    "mean", "std", "min", "max", "delta", "range"};

void append_stats(const std::vector<double>& signal,
                  std::vector<double>& out) {
  double sum = 0.0;
  double lo = signal.front(), hi = signal.front();
  for (double v : signal) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / static_cast<double>(signal.size());
  double sq = 0.0;
  for (double v : signal) sq += (v - mean) * (v - mean);
  const double std_pop = std::sqrt(sq / static_cast<double>(signal.size()));
  out.push_back(mean);
  out.push_back(std_pop);
  out.push_back(lo);
  out.push_back(hi);
  out.push_back(signal.back() - signal.front());
  out.push_back(hi - lo);
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    v.reserve(kNumFeatures);
    for (int c = 0; c < kNumSourceChannels; ++c) {
      for (const char* stat : kStatNames) {
        v.push_back(std::string(source_channel_name(c)) + "_" + stat);
      }
    }
    return v;
  }();
  return names;
}

FeatureVector featurize_window(const ManeuverWindow& window) {
  FeatureVector fv;
  fv.label = window.label;
  fv.values.reserve(kNumFeatures);
  for (CanChannel ch : kAllCanChannels) {
    append_stats(window.frames.column(ch), fv.values);
  }
  append_stats(window.frames.columns[kColGroundSpeed], fv.values);

  std::vector<double> heading_delta =
      unwrap_angle(window.frames.columns[kColHeading]);
  const double first = heading_delta.front();
  for (double& v : heading_delta) v -= first;
  append_stats(heading_delta, fv.values);
  return fv;
}

std::vector<ManeuverLabel> Dataset::class_list() const {
  std::vector<ManeuverLabel> out;
  for (ManeuverLabel label : kAllLabels) {
    if (class_counts[static_cast<int>(label)] > 0) out.push_back(label);
  }
  return out;
}

Dataset build_dataset(const std::vector<ManeuverWindow>& windows) {
  if (windows.empty()) {
    throw Error(ErrorCode::EmptyInput, "no windows to featurize");
  }
  Dataset ds;
  ds.feature_names = feature_names();
  ds.rows.reserve(windows.size());
  for (const ManeuverWindow& window : windows) {
    ds.rows.push_back(featurize_window(window));
    ds.class_counts[static_cast<int>(window.label)]++;
  }
  return ds;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  for (const std::string& name : dataset.feature_names) out << name << ',';
  out << "label\n";
  for (const FeatureVector& row : dataset.rows) {
    for (double v : row.values) out << detail::format_double(v) << ',';
    out << name(row.label) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyInput, "dataset CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Dataset ds;
  {
    const auto cells = detail::split_csv_line(line);
    if (cells.size() < 2 || cells.back() != "label") {
      throw Error(ErrorCode::MalformedRecord,
                  "line 1: dataset header must end in 'label'");
    }
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      ds.feature_names.emplace_back(cells[i]);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != ds.feature_names.size() + 1) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(ds.feature_names.size() + 1) + " cells");
    }
    FeatureVector row;
    row.values.reserve(ds.feature_names.size());
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      double v;
      if (!detail::parse_double(cells[i], v) || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": bad value");
      }
      row.values.push_back(v);
    }
    const auto label = label_from_name(cells.back());
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "line " + std::to_string(line_no) + ": unknown label '" +
                      std::string(cells.back()) + "'");
    }
    row.label = *label;
    ds.class_counts[static_cast<int>(*label)]++;
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) {
    throw Error(ErrorCode::EmptyInput, "dataset CSV has no rows");
  }
  return ds;
}

}  // namespace mkit
