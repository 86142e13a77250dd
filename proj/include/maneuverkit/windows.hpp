#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "maneuverkit/frame_table.hpp"

namespace mkit {

struct LabelEvent {
  double t_label = 0.0;
  ManeuverLabel label = ManeuverLabel::u_turn;

  friend bool operator==(const LabelEvent&, const LabelEvent&) = default;
};

/// A labeled +-10 s slice of a FrameTable centered on the grid tick
/// nearest the label timestamp: always 201 rows.
struct ManeuverWindow {
  ManeuverLabel label = ManeuverLabel::u_turn;
  double t_label = 0.0;
  FrameTable frames;
};

struct SkippedEvent {
  LabelEvent event;
  std::string reason;  // "left edge" or "right edge"
};

struct WindowExtraction {
  std::vector<ManeuverWindow> windows;
  std::vector<SkippedEvent> skipped;
};

inline constexpr std::size_t kWindowRows = 201;  // +-10 s at 10 Hz, inclusive

/// Cut one window per event whose full span fits inside the table. Events
/// too close to an edge are skipped and reported; overlapping windows are
/// fine. Events are processed in ascending t_label order.
WindowExtraction extract_windows(const FrameTable& table,
                                 std::vector<LabelEvent> events);

/// Write `<label>_<t_label>/data.csv` + `meta.json` under `root`. Returns
/// the sub-trip directory. Throws IoFailure.
std::filesystem::path write_subtrip(const ManeuverWindow& window,
                                    const std::filesystem::path& root);

/// Inverse of write_subtrip. Throws MissingFile, MalformedRecord or
/// LabelUnknown.
ManeuverWindow read_subtrip(const std::filesystem::path& dir);

/// All sub-trips directly under `root`, ordered by directory name.
std::vector<ManeuverWindow> read_subtrip_dir(const std::filesystem::path& root);

/// Label events file: CSV with header `timestamp,label`.
std::vector<LabelEvent> read_label_events(std::istream& in);
void write_label_events(const std::vector<LabelEvent>& events,
                        std::ostream& out);

}  // namespace mkit
