#include "maneuverkit/windows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "io_util.hpp"
#include "maneuverkit/error.hpp"

namespace mkit {

namespace {

using nlohmann::json;

constexpr long long kHalfWindow = 100;  // ticks each side of the center

}  // namespace

WindowExtraction extract_windows(const FrameTable& table,
                                 std::vector<LabelEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const LabelEvent& a, const LabelEvent& b) {
                     return a.t_label < b.t_label;
                   });
  WindowExtraction out;
  const long long tick0 = std::llround(table.t0 * 10.0);
  for (const LabelEvent& event : events) {
    // center on the global epoch tick so re-extraction from a saved window
    // rounds identically
    const long long center = std::llround(event.t_label * 10.0) - tick0;
    if (center - kHalfWindow < 0) {
      out.skipped.push_back({event, "left edge"});
      continue;
    }
    if (center + kHalfWindow >= static_cast<long long>(table.n_rows)) {
      out.skipped.push_back({event, "right edge"});
      continue;
    }
    ManeuverWindow window;
    window.label = event.label;
    window.t_label = event.t_label;
    window.frames = table.slice(static_cast<std::size_t>(center - kHalfWindow),
                                kWindowRows);
    out.windows.push_back(std::move(window));
  }
  return out;
}

std::filesystem::path write_subtrip(const ManeuverWindow& window,
                                    const std::filesystem::path& root) {
  const std::filesystem::path dir =
      root / (std::string(name(window.label)) + "_" +
              detail::format_double(window.t_label));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoFailure,
                "cannot create '" + dir.string() + "': " + ec.message());
  }
  {
    std::ofstream data(dir / "data.csv");
    if (!data) {
      throw Error(ErrorCode::IoFailure,
                  "cannot open '" + (dir / "data.csv").string() + "'");
    }
    write_frame_csv(window.frames, data);
    if (!data.good()) {
      throw Error(ErrorCode::IoFailure,
                  "write failed for '" + (dir / "data.csv").string() + "'");
    }
  }
  {
    std::ofstream meta(dir / "meta.json");
    if (!meta) {
      throw Error(ErrorCode::IoFailure,
                  "cannot open '" + (dir / "meta.json").string() + "'");
    }
    json m;
    m["label"] = name(window.label);
    m["t_label"] = window.t_label;
    meta << m.dump(2) << '\n';
    if (!meta.good()) {
      throw Error(ErrorCode::IoFailure,
                  "write failed for '" + (dir / "meta.json").string() + "'");
    }
  }
  return dir;
}

ManeuverWindow read_subtrip(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  const auto data_path = dir / "data.csv";
  if (!std::filesystem::exists(meta_path)) {
    throw Error(ErrorCode::MissingFile, "missing '" + meta_path.string() + "'");
  }
  if (!std::filesystem::exists(data_path)) {
    throw Error(ErrorCode::MissingFile, "missing '" + data_path.string() + "'");
  }

  ManeuverWindow window;
  {
    std::ifstream meta_in(meta_path);
    json m = json::parse(meta_in, nullptr, false);
    if (m.is_discarded() || !m.is_object() || !m.contains("label") ||
        !m["label"].is_string() || !m.contains("t_label") ||
        !m["t_label"].is_number()) {
      throw Error(ErrorCode::MalformedRecord,
                  "malformed '" + meta_path.string() + "'");
    }
    const std::string label_name = m["label"].get<std::string>();
    const auto label = label_from_name(label_name);
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "unknown maneuver label '" + label_name + "'");
    }
    window.label = *label;
    window.t_label = m["t_label"].get<double>();
  }
  {
    std::ifstream data_in(data_path);
    window.frames = read_frame_csv(data_in);
  }

  const double span =
      window.frames.time_at(window.frames.n_rows - 1) - window.frames.t0;
  if (span > 20.1 || window.t_label < window.frames.t0 - 0.05 ||
      window.t_label > window.frames.time_at(window.frames.n_rows - 1) + 0.05) {
    throw Error(ErrorCode::MalformedRecord,
                "sub-trip '" + dir.string() +
                    "' violates window invariants (span or label position)");
  }
  return window;
}

std::vector<ManeuverWindow> read_subtrip_dir(
    const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorCode::MissingFile,
                "'" + root.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<ManeuverWindow> windows;
  windows.reserve(dirs.size());
  for (const auto& dir : dirs) windows.push_back(read_subtrip(dir));
  return windows;
}

std::vector<LabelEvent> read_label_events(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyInput, "label events file is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,label") {
    throw Error(ErrorCode::MalformedRecord,
                "line 1: expected header 'timestamp,label'");
  }
  std::vector<LabelEvent> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": expected 2 cells");
    }
    LabelEvent event;
    if (!detail::parse_double(cells[0], event.t_label) ||
        !std::isfinite(event.t_label)) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": bad timestamp");
    }
    const auto label = label_from_name(cells[1]);
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "line " + std::to_string(line_no) + ": unknown label '" +
                      std::string(cells[1]) + "'");
    }
    event.label = *label;
    events.push_back(event);
  }
  if (events.empty()) {
    throw Error(ErrorCode::EmptyInput, "label events file has no rows");
  }
  return events;
}

void write_label_events(const std::vector<LabelEvent>& events,
                        std::ostream& out) {
  out << "timestamp,label\n";
  for (const LabelEvent& event : events) {
    out << detail::format_double(event.t_label) << ',' << name(event.label)
        << '\n';
  }
}

}  // namespace mkit
