#include "maneuverkit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "io_util.hpp"
#include "maneuverkit/error.hpp"

namespace mkit {

namespace {

using nlohmann::json;

void sort_and_dedupe(std::vector<SignalSample>& samples) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const SignalSample& a, const SignalSample& b) {
                     return a.t < b.t;
                   });
  // equal timestamps: last-seen value wins (stable sort kept file order)
  std::size_t out = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1].t == samples[i].t) continue;
    samples[out++] = samples[i];
  }
  samples.resize(out);
}

double wrap_heading(double degrees) {
  double w = std::fmod(degrees, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

}  // namespace

CanTrace parse_can_trace(std::istream& in) {
  std::array<std::vector<SignalSample>, kNumCanChannels> per_channel;
  CanTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": not a JSON object");
    }
    const auto name_it = record.find("name");
    const auto value_it = record.find("value");
    const auto ts_it = record.find("timestamp");
    if (name_it == record.end() || !name_it->is_string() ||
        value_it == record.end() || !value_it->is_number() ||
        ts_it == record.end() || !ts_it->is_number()) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) +
                      ": expected string 'name' and numeric 'value', "
                      "'timestamp'");
    }
    const auto channel = can_channel_from_name(name_it->get<std::string>());
    if (!channel) {
      ++trace.unknown_records;
      continue;
    }
    per_channel[static_cast<int>(*channel)].push_back(
        {ts_it->get<double>(), value_it->get<double>()});
  }

  for (CanChannel ch : kAllCanChannels) {
    auto& samples = per_channel[static_cast<int>(ch)];
    if (samples.empty()) continue;
    sort_and_dedupe(samples);
    SignalSeries series{name(ch), unit(ch), std::move(samples)};
    validate_series(series);
    trace.series.push_back(std::move(series));
  }
  if (trace.series.empty()) {
    throw Error(ErrorCode::EmptyInput, "no recognized CAN samples");
  }
  return trace;
}

void write_can_trace(const std::vector<SignalSeries>& series,
                     std::ostream& out) {
  // merge channels by timestamp so the trace reads like a live log
  std::vector<std::size_t> cursor(series.size(), 0);
  while (true) {
    std::size_t best = series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (cursor[i] >= series[i].samples.size()) continue;
      if (best == series.size() ||
          series[i].samples[cursor[i]].t < series[best].samples[cursor[best]].t)
        best = i;
    }
    if (best == series.size()) break;
    const SignalSample& s = series[best].samples[cursor[best]++];
    json record;
    record["name"] = series[best].name;
    record["timestamp"] = s.t;
    record["value"] = s.value;
    out << record.dump() << '\n';
  }
}

std::vector<GpsFix> parse_gps_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyInput, "GPS log is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool speed_in_kmh = false;
  if (line == "timestamp,latitude,longitude,ground_speed,heading") {
    speed_in_kmh = false;
  } else if (line == "timestamp,latitude,longitude,ground_speed_kmh,heading") {
    speed_in_kmh = true;
  } else {
    throw Error(ErrorCode::MalformedRecord, "line 1: unexpected GPS header '" +
                                                line + "'");
  }

  std::vector<GpsFix> fixes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 5) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": expected 5 cells");
    }
    double v[5];
    for (int i = 0; i < 5; ++i) {
      if (!detail::parse_double(cells[i], v[i]) || !std::isfinite(v[i])) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": non-numeric cell '" +
                        std::string(cells[i]) + "'");
      }
    }
    GpsFix fix;
    fix.t = v[0];
    fix.latitude = v[1];
    fix.longitude = v[2];
    fix.ground_speed = speed_in_kmh ? v[3] / 3.6 : v[3];
    fix.heading = wrap_heading(v[4]);
    if (fix.latitude < -90.0 || fix.latitude > 90.0) {
      throw Error(ErrorCode::RangeViolation,
                  "line " + std::to_string(line_no) + ": latitude " +
                      detail::format_double(fix.latitude) +
                      " outside [-90, 90]");
    }
    if (fix.longitude < -180.0 || fix.longitude > 180.0) {
      throw Error(ErrorCode::RangeViolation,
                  "line " + std::to_string(line_no) + ": longitude " +
                      detail::format_double(fix.longitude) +
                      " outside [-180, 180]");
    }
    if (fix.ground_speed < 0.0) {
      throw Error(ErrorCode::RangeViolation,
                  "line " + std::to_string(line_no) + ": negative ground speed");
    }
    fixes.push_back(fix);
  }
  if (fixes.empty()) {
    throw Error(ErrorCode::EmptyInput, "GPS log has no data rows");
  }
  std::stable_sort(fixes.begin(), fixes.end(),
                   [](const GpsFix& a, const GpsFix& b) { return a.t < b.t; });
  // duplicate timestamps keep the last-seen fix
  std::size_t out = 0;
  for (std::size_t i = 0; i < fixes.size(); ++i) {
    if (i + 1 < fixes.size() && fixes[i + 1].t == fixes[i].t) continue;
    fixes[out++] = fixes[i];
  }
  fixes.resize(out);
  return fixes;
}

void write_gps_log(const std::vector<GpsFix>& fixes, std::ostream& out) {
  out << "timestamp,latitude,longitude,ground_speed,heading\n";
  for (const GpsFix& fix : fixes) {
    out << detail::format_double(fix.t) << ','
        << detail::format_double(fix.latitude) << ','
        << detail::format_double(fix.longitude) << ','
        << detail::format_double(fix.ground_speed) << ','
        << detail::format_double(fix.heading) << '\n';
  }
}

}  // namespace mkit
