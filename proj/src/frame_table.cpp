#include "maneuverkit/frame_table.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "io_util.hpp"
#include "maneuverkit/error.hpp"

namespace mkit {

double FrameTable::time_at(std::size_t row) const {
  // grid ticks are exact multiples of 0.1 s; reconstruct from the integer
  // tick to keep every row's timestamp bit-stable
  const long long tick0 = std::llround(t0 * 10.0);
  return static_cast<double>(tick0 + static_cast<long long>(row)) / 10.0;
}

FrameTable FrameTable::slice(std::size_t first, std::size_t count) const {
  FrameTable out;
  out.t0 = time_at(first);
  out.dt = dt;
  out.n_rows = count;
  for (int c = 0; c < kNumFrameColumns; ++c) {
    out.columns[c].assign(columns[c].begin() + static_cast<long>(first),
                          columns[c].begin() + static_cast<long>(first + count));
  }
  return out;
}

void write_frame_csv(const FrameTable& table, std::ostream& out) {
  out << "timestamp";
  for (int c = 0; c < kNumFrameColumns; ++c) out << ',' << frame_column_name(c);
  out << '\n';
  for (std::size_t i = 0; i < table.n_rows; ++i) {
    out << detail::format_time(table.time_at(i));
    for (int c = 0; c < kNumFrameColumns; ++c) {
      out << ',' << detail::format_double(table.columns[c][i]);
    }
    out << '\n';
  }
}

FrameTable read_frame_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyInput, "frame CSV is empty");
  }
  {
    std::string expected = "timestamp";
    for (int c = 0; c < kNumFrameColumns; ++c) {
      expected += ',';
      expected += frame_column_name(c);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) {
      throw Error(ErrorCode::MalformedRecord,
                  "line 1: unexpected frame CSV header");
    }
  }

  FrameTable table;
  std::size_t line_no = 1;
  double prev_t = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != kNumFrameColumns + 1) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(kNumFrameColumns + 1) + " cells");
    }
    double t;
    if (!detail::parse_double(cells[0], t) || !std::isfinite(t)) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": bad timestamp");
    }
    if (table.n_rows == 0) {
      table.t0 = t;
    } else if (std::abs(t - prev_t - 0.1) > 1e-6) {
      throw Error(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) +
                      ": rows not on a uniform 0.1 s grid");
    }
    prev_t = t;
    for (int c = 0; c < kNumFrameColumns; ++c) {
      double v;
      if (!detail::parse_double(cells[c + 1], v) || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": bad value in '" +
                        std::string(frame_column_name(c)) + "'");
      }
      table.columns[c].push_back(v);
    }
    ++table.n_rows;
  }
  if (table.n_rows == 0) {
    throw Error(ErrorCode::EmptyInput, "frame CSV has no rows");
  }
  return table;
}

}  // namespace mkit
