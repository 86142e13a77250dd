// Command-line front end: synth / ingest / sync / parse / featurize /
// train / eval / pipeline. Every artifact a command writes is a pure
// function of its inputs and --seed, so repeated runs are byte-identical.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maneuverkit/error.hpp"
#include "maneuverkit/eval.hpp"
#include "maneuverkit/features.hpp"
#include "maneuverkit/forest.hpp"
#include "maneuverkit/ingest.hpp"
#include "maneuverkit/svm.hpp"
#include "maneuverkit/synth.hpp"
#include "maneuverkit/timesync.hpp"
#include "maneuverkit/windows.hpp"

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw mkit::Error(mkit::ErrorCode::MissingFile,
                      "cannot open '" + path + "'");
  }
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (fs::path(path).has_parent_path()) {
    std::error_code ec;
    fs::create_directories(fs::path(path).parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw mkit::Error(mkit::ErrorCode::IoFailure,
                      "cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out.good()) {
    throw mkit::Error(mkit::ErrorCode::IoFailure,
                      "write failed for '" + path + "'");
  }
}

struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t total = 0;  // 0: keep the default 700-window mix
  std::string counts;     // comma list in label enumeration order
  std::string config_path;
  double noise_scale = 1.0;
  double gps_rate = 1.0;
  double can_rate = 10.0;
};

void add_synth_flags(CLI::App* cmd, SynthOptions& opt, bool with_seed) {
  if (with_seed) {
    cmd->add_option("--seed", opt.seed, "generator seed")
        ->envname("MANEUVERKIT_SEED")
        ->required();
  }
  cmd->add_option("--total", opt.total,
                  "total window count, spread over the default imbalanced mix");
  cmd->add_option("--counts", opt.counts,
                  "per-class counts, comma list in label order "
                  "(u_turn,left_turn,right_turn,hard_brake,lane_change_left,"
                  "lane_change_right,approach_intersection)");
  cmd->add_option("--config", opt.config_path,
                  "generator config JSON (flags override its fields)");
  cmd->add_option("--noise-scale", opt.noise_scale, "noise multiplier, >= 0")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gps-rate", opt.gps_rate, "GPS sample rate, Hz");
  cmd->add_option("--can-rate", opt.can_rate, "CAN sample rate, Hz");
}

mkit::GeneratorConfig make_config(const SynthOptions& opt, CLI::App* cmd) {
  mkit::GeneratorConfig config;
  if (!opt.config_path.empty()) {
    config = mkit::config_from_json(read_file(opt.config_path));
  }
  config.seed = opt.seed;
  if (cmd->count("--noise-scale")) config.noise_scale = opt.noise_scale;
  if (cmd->count("--gps-rate")) config.gps_rate_hz = opt.gps_rate;
  if (cmd->count("--can-rate")) config.can_rate_hz = opt.can_rate;
  if (config.gps_rate_hz <= 0.0 || config.can_rate_hz <= 0.0) {
    throw mkit::Error(mkit::ErrorCode::RangeViolation,
                      "sample rates must be positive");
  }
  if (!opt.counts.empty()) {
    std::array<std::size_t, mkit::kNumLabels> counts{};
    std::stringstream ss(opt.counts);
    std::string cell;
    int i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= mkit::kNumLabels) break;
      counts[i++] = static_cast<std::size_t>(std::stoull(cell));
    }
    if (i != mkit::kNumLabels) {
      throw mkit::Error(mkit::ErrorCode::MalformedRecord,
                        "--counts needs exactly 7 comma-separated numbers");
    }
    config.class_counts = counts;
  } else if (opt.total > 0) {
    const mkit::GeneratorConfig defaults;
    const double scale = static_cast<double>(opt.total) /
                         static_cast<double>(defaults.total());
    for (int k = 0; k < mkit::kNumLabels; ++k) {
      config.class_counts[k] = static_cast<std::size_t>(std::max<long long>(
          2, std::llround(static_cast<double>(defaults.class_counts[k]) *
                          scale)));
    }
  }
  return config;
}

struct TrainOptions {
  std::uint64_t seed = 0;
  std::string model_kind = "forest";
  // forest
  std::size_t trees = 100;
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 8;
  // svm
  std::string kernel = "rbf";
  double gamma = 0.0;  // 0: 1/d
  double cost = 1.0;
  double tol = 1e-3;
  std::size_t max_passes = 5;
};

void add_train_flags(CLI::App* cmd, TrainOptions& opt, bool with_seed) {
  if (with_seed) {
    cmd->add_option("--seed", opt.seed, "training seed")
        ->envname("MANEUVERKIT_SEED")
        ->required();
  }
  cmd->add_option("--model", opt.model_kind, "model kind")
      ->check(CLI::IsMember({"forest", "svm"}))
      ->required();
  cmd->add_option("--trees", opt.trees, "forest: number of trees (n_trees)");
  cmd->add_option("--max-depth", opt.max_depth,
                  "forest: depth limit, 0 = grow until pure");
  cmd->add_option("--min-samples-split", opt.min_samples_split,
                  "forest: minimum rows to split a node");
  cmd->add_option("--max-features", opt.max_features,
                  "forest: candidate features per split");
  cmd->add_option("--kernel", opt.kernel, "svm: kernel kind")
      ->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--gamma", opt.gamma, "svm: rbf gamma, 0 = 1/n_features");
  cmd->add_option("--C", opt.cost, "svm: soft-margin C");
  cmd->add_option("--tol", opt.tol, "svm: KKT tolerance");
  cmd->add_option("--max-passes", opt.max_passes,
                  "svm: zero-update sweeps before SMO stops");
}

std::string train_model_json(const mkit::Dataset& train,
                             const TrainOptions& opt) {
  if (opt.model_kind == "forest") {
    mkit::ForestHyperparams hp;
    hp.n_trees = opt.trees;
    if (opt.max_depth > 0) hp.max_depth = opt.max_depth;
    hp.min_samples_split = opt.min_samples_split;
    hp.max_features = opt.max_features;
    hp.seed = opt.seed;
    return mkit::forest_to_json(mkit::train_forest(train, hp));
  }
  mkit::KernelSpec kernel;
  kernel.kind = opt.kernel == "linear" ? mkit::KernelSpec::Kind::linear
                                       : mkit::KernelSpec::Kind::rbf;
  kernel.gamma = opt.gamma;
  mkit::SmoParams params;
  params.C = opt.cost;
  params.tol = opt.tol;
  params.max_passes = opt.max_passes;
  params.seed = opt.seed;
  return mkit::svm_to_json(mkit::train_svm(train, kernel, params));
}

mkit::PredictFn predict_fn_from_json(const std::string& text,
                                     std::shared_ptr<void>& keep_alive) {
  // sniff the "model" tag
  if (text.find("\"model\":\"forest\"") != std::string::npos ||
      text.find("\"model\": \"forest\"") != std::string::npos) {
    auto model =
        std::make_shared<mkit::ForestModel>(mkit::forest_from_json(text));
    keep_alive = model;
    return [model](std::span<const double> x) {
      return mkit::predict_forest(*model, x);
    };
  }
  auto model = std::make_shared<mkit::SvmModel>(mkit::svm_from_json(text));
  keep_alive = model;
  return [model](std::span<const double> x) {
    return mkit::predict_svm(*model, x);
  };
}

/// Best-effort SVG line chart of a window: four stacked signal strips.
void write_window_plot(const mkit::ManeuverWindow& window,
                       const fs::path& path) {
  const int cols[] = {static_cast<int>(mkit::CanChannel::steering_wheel_angle),
                      static_cast<int>(mkit::CanChannel::vehicle_speed),
                      static_cast<int>(mkit::CanChannel::accelerator_pedal_position),
                      mkit::kColHeading};
  const double width = 640.0, strip = 110.0, pad = 24.0;
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << (4 * strip + pad) << "'>\n";
  svg << "<text x='8' y='14' font-size='12'>" << mkit::name(window.label)
      << " @ " << window.t_label << "</text>\n";
  for (int s = 0; s < 4; ++s) {
    const auto& col = window.frames.columns[cols[s]];
    double lo = col[0], hi = col[0];
    for (double v : col) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double y0 = pad + s * strip;
    svg << "<text x='8' y='" << (y0 + 12) << "' font-size='10'>"
        << mkit::frame_column_name(cols[s]) << "</text>\n";
    svg << "<polyline fill='none' stroke='#336' stroke-width='1' points='";
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double x = 10.0 + (width - 20.0) * static_cast<double>(i) /
                                  static_cast<double>(col.size() - 1);
      const double y = y0 + strip - 8.0 - (strip - 24.0) * (col[i] - lo) /
                                              (hi - lo);
      svg << x << ',' << y << ' ';
    }
    svg << "'/>\n";
  }
  svg << "</svg>\n";
  write_file(path.string(), svg.str());
}

int run_synth(const SynthOptions& opt, const std::string& out_dir,
              CLI::App* cmd) {
  const mkit::GeneratorConfig config = make_config(opt, cmd);
  const auto dirs = mkit::generate_dataset(config, out_dir);
  std::cout << "wrote " << dirs.size() << " sub-trips to " << out_dir << "\n";
  return 0;
}

int run_ingest(const std::string& can_path, const std::string& gps_path) {
  if (can_path.empty() && gps_path.empty()) {
    throw mkit::Error(mkit::ErrorCode::EmptyInput,
                      "ingest needs --can and/or --gps");
  }
  if (!can_path.empty()) {
    std::ifstream in = open_input(can_path);
    const mkit::CanTrace trace = mkit::parse_can_trace(in);
    for (const auto& series : trace.series) {
      mkit::validate_series(series);
      std::cout << series.name << ": " << series.samples.size()
                << " samples [" << series.unit << "]\n";
    }
    std::cout << "unknown records skipped: " << trace.unknown_records << "\n";
  }
  if (!gps_path.empty()) {
    std::ifstream in = open_input(gps_path);
    const auto fixes = mkit::parse_gps_log(in);
    std::cout << "gps: " << fixes.size() << " fixes\n";
  }
  return 0;
}

int run_sync(const std::string& can_path, const std::string& gps_path,
             const std::string& out_path) {
  std::ifstream can_in = open_input(can_path);
  const mkit::CanTrace trace = mkit::parse_can_trace(can_in);
  std::ifstream gps_in = open_input(gps_path);
  const auto fixes = mkit::parse_gps_log(gps_in);
  const mkit::FrameTable table = mkit::align_streams(trace.series, fixes);
  std::ostringstream csv;
  mkit::write_frame_csv(table, csv);
  write_file(out_path, csv.str());
  std::cout << "wrote " << table.n_rows << " rows to " << out_path << "\n";
  return 0;
}

int run_parse(const std::string& table_path, const std::string& events_path,
              const std::string& out_dir, bool emit_plots) {
  std::ifstream table_in = open_input(table_path);
  const mkit::FrameTable table = mkit::read_frame_csv(table_in);
  std::ifstream events_in = open_input(events_path);
  const auto events = mkit::read_label_events(events_in);
  const mkit::WindowExtraction extraction =
      mkit::extract_windows(table, events);
  for (const auto& window : extraction.windows) {
    const fs::path dir = mkit::write_subtrip(window, out_dir);
    if (emit_plots) write_window_plot(window, dir / "plot.svg");
  }
  for (const auto& skip : extraction.skipped) {
    std::cout << "skipped " << mkit::name(skip.event.label) << " at "
              << skip.event.t_label << ": " << skip.reason << "\n";
  }
  std::cout << "wrote " << extraction.windows.size() << " sub-trips ("
            << extraction.skipped.size() << " skipped)\n";
  return 0;
}

int run_featurize(const std::string& data_dir, const std::string& out_path) {
  const auto windows = mkit::read_subtrip_dir(data_dir);
  if (windows.empty()) {
    throw mkit::Error(mkit::ErrorCode::EmptyInput,
                      "no sub-trips under '" + data_dir + "'");
  }
  const mkit::Dataset dataset = mkit::build_dataset(windows);
  std::ostringstream csv;
  mkit::write_dataset_csv(dataset, csv);
  write_file(out_path, csv.str());
  std::cout << "wrote " << dataset.rows.size() << " rows to " << out_path
            << "\n";
  return 0;
}

int run_train(const std::string& data_path, const std::string& out_path,
              const TrainOptions& opt) {
  std::ifstream in = open_input(data_path);
  const mkit::Dataset dataset = mkit::read_dataset_csv(in);
  write_file(out_path, train_model_json(dataset, opt));
  std::cout << "wrote " << opt.model_kind << " model to " << out_path << "\n";
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& report_path,
             const std::string& confusion_path) {
  std::shared_ptr<void> keep_alive;
  const mkit::PredictFn predict =
      predict_fn_from_json(read_file(model_path), keep_alive);
  std::ifstream in = open_input(data_path);
  const mkit::Dataset dataset = mkit::read_dataset_csv(in);
  const mkit::EvalReport report = mkit::evaluate(predict, dataset);
  if (!report_path.empty()) {
    write_file(report_path, mkit::report_to_json(report));
  }
  if (!confusion_path.empty()) {
    std::ostringstream csv;
    mkit::write_confusion_csv(report, csv);
    write_file(confusion_path, csv.str());
  }
  std::cout << mkit::report_to_text(report);
  return 0;
}

int run_pipeline(const SynthOptions& synth_opt, TrainOptions train_opt,
                 const std::string& out_dir, double test_fraction,
                 CLI::App* cmd) {
  train_opt.seed = synth_opt.seed;
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw mkit::Error(mkit::ErrorCode::IoFailure,
                      "cannot create '" + out_dir + "': " + ec.message());
  }

  const mkit::GeneratorConfig config = make_config(synth_opt, cmd);
  mkit::generate_dataset(config, out / "dataset");
  const auto windows = mkit::read_subtrip_dir(out / "dataset");
  const mkit::Dataset dataset = mkit::build_dataset(windows);
  {
    std::ostringstream csv;
    mkit::write_dataset_csv(dataset, csv);
    write_file((out / "features.csv").string(), csv.str());
  }

  const auto [train, test] =
      mkit::split_stratified(dataset, test_fraction, synth_opt.seed);
  const std::string model_json = train_model_json(train, train_opt);
  write_file((out / "model.json").string(), model_json);

  std::shared_ptr<void> keep_alive;
  const mkit::PredictFn predict = predict_fn_from_json(model_json, keep_alive);
  const mkit::EvalReport report = mkit::evaluate(predict, test);
  write_file((out / "report.json").string(), mkit::report_to_json(report));
  std::cout << mkit::report_to_text(report);
  std::cout << "macro_f1=" << report.macro_f1 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maneuverkit: CAN+GPS driving logs to maneuver classifiers"};
  app.require_subcommand(1);

  // synth
  SynthOptions synth_opt;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "emit a synthetic dataset");
  add_synth_flags(synth, synth_opt, true);
  synth->add_option("--out", synth_out, "output dataset directory")
      ->required();

  // ingest
  std::string ingest_can, ingest_gps;
  CLI::App* ingest = app.add_subcommand("ingest", "validate raw logs");
  ingest->add_option("--can", ingest_can, "CAN trace file");
  ingest->add_option("--gps", ingest_gps, "GPS log file");

  // sync
  std::string sync_can, sync_gps, sync_out;
  CLI::App* sync =
      app.add_subcommand("sync", "fuse raw logs onto the 10 Hz grid");
  sync->add_option("--can", sync_can, "CAN trace file")->required();
  sync->add_option("--gps", sync_gps, "GPS log file")->required();
  sync->add_option("--out", sync_out, "output FrameTable CSV")->required();

  // parse
  std::string parse_table, parse_events, parse_out;
  bool parse_plots = false;
  CLI::App* parse =
      app.add_subcommand("parse", "cut labeled windows into sub-trips");
  parse->add_option("--table", parse_table, "FrameTable CSV")->required();
  parse->add_option("--events", parse_events,
                    "label events CSV (timestamp,label)")
      ->required();
  parse->add_option("--out", parse_out, "output dataset directory")
      ->required();
  parse->add_flag("--emit-plots", parse_plots,
                  "write per-window SVG line charts");

  // featurize
  std::string feat_dir, feat_out;
  CLI::App* featurize =
      app.add_subcommand("featurize", "sub-trips to a feature CSV");
  featurize->add_option("--data", feat_dir, "dataset directory")->required();
  featurize->add_option("--out", feat_out, "output dataset CSV")->required();

  // train
  TrainOptions train_opt;
  std::string train_data, train_out;
  CLI::App* train = app.add_subcommand("train", "train a classifier");
  train->add_option("--data", train_data, "dataset CSV")->required();
  train->add_option("--out", train_out, "output model JSON")->required();
  add_train_flags(train, train_opt, true);

  // eval
  std::string eval_model, eval_data, eval_report, eval_confusion;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--model", eval_model, "model JSON")->required();
  eval->add_option("--data", eval_data, "dataset CSV")->required();
  eval->add_option("--report", eval_report, "output report JSON");
  eval->add_option("--confusion-csv", eval_confusion,
                   "output confusion matrix CSV");

  // pipeline
  SynthOptions pipe_synth;
  TrainOptions pipe_train;
  std::string pipe_out;
  double pipe_fraction = 0.2;
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "synth -> featurize -> train -> eval");
  add_synth_flags(pipeline, pipe_synth, true);
  add_train_flags(pipeline, pipe_train, false);
  pipeline->add_option("--out", pipe_out, "output directory")->required();
  pipeline->add_option("--test-fraction", pipe_fraction,
                       "stratified test fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  try {
    if (synth->parsed()) return run_synth(synth_opt, synth_out, synth);
    if (ingest->parsed()) return run_ingest(ingest_can, ingest_gps);
    if (sync->parsed()) return run_sync(sync_can, sync_gps, sync_out);
    if (parse->parsed())
      return run_parse(parse_table, parse_events, parse_out, parse_plots);
    if (featurize->parsed()) return run_featurize(feat_dir, feat_out);
    if (train->parsed()) return run_train(train_data, train_out, train_opt);
    if (eval->parsed())
      return run_eval(eval_model, eval_data, eval_report, eval_confusion);
    if (pipeline->parsed())
      return run_pipeline(pipe_synth, pipe_train, pipe_out, pipe_fraction,
                          pipeline);
  } catch (const mkit::Error& e) {
    std::cerr << "error: " << e.code_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
