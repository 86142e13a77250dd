#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "maneuverkit/error.hpp"
#include "maneuverkit/eval.hpp"
#include "maneuverkit/features.hpp"
#include "maneuverkit/forest.hpp"
#include "maneuverkit/ingest.hpp"
#include "maneuverkit/svm.hpp"
#include "maneuverkit/synth.hpp"
#include "maneuverkit/timesync.hpp"
#include "test_util.hpp"

using namespace mkit;

namespace {

struct PipedTrip {
  FrameTable table;
  ManeuverWindow window;
  std::vector<SignalSeries> can;
  std::vector<GpsFix> gps;
};

PipedTrip pipe_trip(ManeuverLabel label, std::uint64_t seed,
                    const GeneratorConfig& config = {}) {
  Rng rng(seed);
  const GeneratedTrip trip = generate_maneuver(label, config, rng);
  PipedTrip out;
  std::istringstream can_in(trip.can_trace);
  out.can = parse_can_trace(can_in).series;
  std::istringstream gps_in(trip.gps_log);
  out.gps = parse_gps_log(gps_in);
  out.table = align_streams(out.can, out.gps);
  const auto extraction = extract_windows(out.table, {trip.event});
  REQUIRE(extraction.windows.size() == 1);
  out.window = extraction.windows[0];
  return out;
}

const SignalSeries& channel(const std::vector<SignalSeries>& series,
                            CanChannel ch) {
  for (const auto& s : series) {
    if (s.name == name(ch)) return s;
  }
  FAIL("channel missing");
  return series.front();
}

}  // namespace

TEST_CASE("hard brake: pedal reaches exactly zero, speed collapses") {
  for (std::uint64_t seed : {1ULL, 5ULL, 9ULL}) {
    const PipedTrip t = pipe_trip(ManeuverLabel::hard_brake, seed);
    // the logger sees the pedal sensor read an exact 0 while braking
    const SignalSeries& pedal_raw =
        channel(t.can, CanChannel::accelerator_pedal_position);
    bool exact_zero_inside_window = false;
    for (const auto& s : pedal_raw.samples) {
      if (std::abs(s.t - t.window.t_label) <= 10.0 && s.value == 0.0) {
        exact_zero_inside_window = true;
      }
    }
    CHECK(exact_zero_inside_window);
    // the resampled column can ring slightly around the drop but stays
    // pinned near zero
    const auto& pedal =
        t.window.frames.column(CanChannel::accelerator_pedal_position);
    CHECK(*std::min_element(pedal.begin(), pedal.end()) <= 0.5);
    const auto& speed = t.window.frames.column(CanChannel::vehicle_speed);
    CHECK(speed.back() - speed.front() < -25.0);  // km/h
  }
}

TEST_CASE("u-turn: net unwrapped heading change near 180 degrees") {
  for (std::uint64_t seed : {2ULL, 4ULL, 8ULL}) {
    const PipedTrip t = pipe_trip(ManeuverLabel::u_turn, seed);
    const auto unwrapped = unwrap_angle(t.window.frames.columns[kColHeading]);
    const double net = std::abs(unwrapped.back() - unwrapped.front());
    CHECK(net >= 150.0);
    CHECK(net <= 210.0);
  }
}

TEST_CASE("left turns ride a larger radius than right turns") {
  for (std::uint64_t seed : {3ULL, 6ULL, 12ULL}) {
    GeneratorConfig config;
    Rng left_rng(seed), right_rng(seed);
    const GeneratedTrip left =
        generate_maneuver(ManeuverLabel::left_turn, config, left_rng);
    const GeneratedTrip right =
        generate_maneuver(ManeuverLabel::right_turn, config, right_rng);

    auto steering_stats = [](const GeneratedTrip& trip) {
      std::istringstream in(trip.can_trace);
      const auto series = parse_can_trace(in).series;
      const SignalSeries& steer =
          channel(series, CanChannel::steering_wheel_angle);
      double peak = 0.0, first = 0.0, last = 0.0;
      bool seen = false;
      for (const auto& s : steer.samples) {
        peak = std::max(peak, std::abs(s.value));
        if (std::abs(s.value) > 20.0) {
          if (!seen) first = s.t;
          last = s.t;
          seen = true;
        }
      }
      return std::pair<double, double>{peak, seen ? last - first : 0.0};
    };
    const auto [left_peak, left_duration] = steering_stats(left);
    const auto [right_peak, right_duration] = steering_stats(right);
    CHECK(left_peak < right_peak);
    CHECK(left_duration > right_duration);
  }
}

TEST_CASE("lane changes are mirrored S-curves with no net heading") {
  for (ManeuverLabel label :
       {ManeuverLabel::lane_change_left, ManeuverLabel::lane_change_right}) {
    const PipedTrip t = pipe_trip(label, 13);
    const auto unwrapped = unwrap_angle(t.window.frames.columns[kColHeading]);
    CHECK(std::abs(unwrapped.back() - unwrapped.front()) < 25.0);
    const auto& steer =
        t.window.frames.column(CanChannel::steering_wheel_angle);
    const double hi = *std::max_element(steer.begin(), steer.end());
    const double lo = *std::min_element(steer.begin(), steer.end());
    CHECK(hi > 4.0);    // swings both ways
    CHECK(lo < -4.0);
  }
}

TEST_CASE("every label produces a trip the pipeline accepts") {
  for (ManeuverLabel label : kAllLabels) {
    for (std::uint64_t seed : {21ULL, 22ULL}) {
      const PipedTrip t = pipe_trip(label, seed);
      CHECK(t.window.frames.n_rows == kWindowRows);
      for (const auto& s : t.can) CHECK_NOTHROW(validate_series(s));
    }
  }
}

TEST_CASE("generate_dataset: counts and labels as requested") {
  test::TempDir tmp;
  GeneratorConfig config;
  config.seed = 31;
  config.class_counts = {3, 2, 2, 2, 2, 2, 2};
  const auto dirs = generate_dataset(config, tmp.path());
  CHECK(dirs.size() == config.total());

  const auto windows = read_subtrip_dir(tmp.path());
  std::map<ManeuverLabel, std::size_t> got;
  for (const auto& w : windows) got[w.label]++;
  for (ManeuverLabel label : kAllLabels) {
    CHECK(got[label] == config.class_counts[static_cast<int>(label)]);
  }
}

TEST_CASE("generate_dataset: byte-identical per seed") {
  test::TempDir tmp;
  GeneratorConfig config;
  config.seed = 77;
  config.class_counts = {1, 1, 1, 1, 1, 1, 1};
  const auto dirs1 = generate_dataset(config, tmp.path() / "a");
  const auto dirs2 = generate_dataset(config, tmp.path() / "b");
  REQUIRE(dirs1.size() == dirs2.size());
  for (std::size_t i = 0; i < dirs1.size(); ++i) {
    for (const char* file : {"data.csv", "meta.json"}) {
      std::ifstream f1(dirs1[i] / file), f2(dirs2[i] / file);
      std::stringstream s1, s2;
      s1 << f1.rdbuf();
      s2 << f2.rdbuf();
      CHECK(s1.str() == s2.str());
      CHECK(!s1.str().empty());
    }
  }
}

TEST_CASE("noise_scale zero freezes each class to one steering trace") {
  test::TempDir tmp;
  GeneratorConfig config;
  config.seed = 5;
  config.noise_scale = 0.0;
  config.class_counts = {3, 0, 0, 0, 0, 0, 0};
  generate_dataset(config, tmp.path());
  const auto windows = read_subtrip_dir(tmp.path());
  REQUIRE(windows.size() == 3);
  const auto& reference =
      windows[0].frames.column(CanChannel::steering_wheel_angle);
  for (std::size_t i = 1; i < windows.size(); ++i) {
    CHECK(windows[i].frames.column(CanChannel::steering_wheel_angle) ==
          reference);
  }
}

TEST_CASE("kinematic consistency: differentiated position recovers speed") {
  for (ManeuverLabel label :
       {ManeuverLabel::left_turn, ManeuverLabel::lane_change_right,
        ManeuverLabel::hard_brake}) {
    const PipedTrip t = pipe_trip(label, 41);
    const auto& lat = t.table.columns[kColLatitude];
    const auto& lon = t.table.columns[kColLongitude];
    const auto& speed = t.table.columns[kColGroundSpeed];
    const double t_label = t.window.t_label;
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    constexpr double kEarthRadius = 6371000.0;
    for (std::size_t i = 2; i + 2 < t.table.n_rows; ++i) {
      const double when = t.table.time_at(i);
      if (std::abs(when - t_label) <= 8.0) continue;  // near the maneuver
      if (speed[i] < 5.0) continue;                   // slow segments noisy
      const double dlat = (lat[i + 1] - lat[i - 1]) / 0.2 * kDegToRad;
      const double dlon = (lon[i + 1] - lon[i - 1]) / 0.2 * kDegToRad *
                          std::cos(lat[i] * kDegToRad);
      const double v = kEarthRadius * std::hypot(dlat, dlon);
      CHECK(std::abs(v - speed[i]) / speed[i] < 0.10);
    }
  }
}

TEST_CASE("class separability: every pair splits under a depth-3 tree") {
  // guards against a degenerate generator: with default noise, any two
  // classes must be tellable apart from the 60 features alone
  test::TempDir tmp;
  GeneratorConfig config;
  config.seed = 97;
  config.class_counts = {40, 40, 40, 40, 40, 40, 40};
  generate_dataset(config, tmp.path());
  const Dataset ds = build_dataset(read_subtrip_dir(tmp.path()));

  for (int a = 0; a < kNumLabels; ++a) {
    for (int b = a + 1; b < kNumLabels; ++b) {
      Dataset pair;
      pair.feature_names = ds.feature_names;
      for (const auto& row : ds.rows) {
        const int label = static_cast<int>(row.label);
        if (label != a && label != b) continue;
        pair.rows.push_back(row);
        pair.class_counts[label]++;
      }
      ForestHyperparams hp;
      hp.max_depth = 3;
      hp.max_features = kNumFeatures;  // plain tree, all features visible
      Rng rng(1);
      std::vector<std::size_t> rows(pair.rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      const auto tree = train_tree(pair, rows, hp, rng);
      std::size_t hits = 0;
      for (const auto& row : pair.rows) {
        if (predict_tree(*tree, row.values) == row.label) ++hits;
      }
      const double accuracy =
          static_cast<double>(hits) / static_cast<double>(pair.rows.size());
      INFO("pair ", name(static_cast<ManeuverLabel>(a)), " vs ",
           name(static_cast<ManeuverLabel>(b)));
      CHECK(accuracy >= 0.90);
    }
  }
}

TEST_CASE("default-mix split: bagged forest interpolates, svm comes close") {
  test::TempDir tmp;
  GeneratorConfig config;
  config.seed = 42;
  // the default imbalanced proportions at desk scale
  config.class_counts = {35, 28, 28, 21, 12, 10, 7};
  generate_dataset(config, tmp.path());
  const Dataset ds = build_dataset(read_subtrip_dir(tmp.path()));
  const auto [train, test] = split_stratified(ds, 0.2, 42);

  ForestHyperparams hp;
  hp.seed = 42;
  const ForestModel forest = train_forest(train, hp);
  std::size_t hits = 0;
  for (const auto& row : train.rows) {
    if (predict_forest(forest, row.values) == row.label) ++hits;
  }
  CHECK(static_cast<double>(hits) / train.rows.size() >= 0.99);

  SmoParams params;
  params.seed = 42;
  const SvmModel svm = train_svm(train, KernelSpec{}, params);
  hits = 0;
  for (const auto& row : train.rows) {
    if (predict_svm(svm, row.values) == row.label) ++hits;
  }
  CHECK(static_cast<double>(hits) / train.rows.size() >= 0.90);
}

TEST_CASE("config json: labels keyed by name, defaults preserved") {
  const GeneratorConfig config = config_from_json(
      "{\"seed\": 9, \"noise_scale\": 0.5,"
      " \"class_counts\": {\"u_turn\": 4, \"hard_brake\": 6}}");
  CHECK(config.seed == 9);
  CHECK(config.noise_scale == 0.5);
  CHECK(config.class_counts[0] == 4);
  CHECK(config.class_counts[3] == 6);
  CHECK(config.class_counts[1] == 140);  // untouched default
  CHECK(config.gps_rate_hz == 1.0);
  CHECK_THROWS_AS(config_from_json("{\"class_counts\": {\"drift\": 1}}"),
                  Error);
  CHECK_THROWS_AS(config_from_json("{\"noise_scale\": -1}"), Error);
}
