// Python bindings for the main pipeline operations: log parsing, time
// synchronization, windowing, featurization, the two classifiers and the
// evaluation report.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "maneuverkit/error.hpp"
#include "maneuverkit/eval.hpp"
#include "maneuverkit/features.hpp"
#include "maneuverkit/forest.hpp"
#include "maneuverkit/ingest.hpp"
#include "maneuverkit/spline.hpp"
#include "maneuverkit/svm.hpp"
#include "maneuverkit/synth.hpp"
#include "maneuverkit/timesync.hpp"
#include "maneuverkit/windows.hpp"

namespace py = pybind11;
using namespace mkit;

namespace {

ManeuverLabel parse_label(const std::string& name) {
  const auto label = label_from_name(name);
  if (!label) {
    throw Error(ErrorCode::LabelUnknown, "unknown label '" + name + "'");
  }
  return *label;
}

KernelSpec parse_kernel(const std::string& kind, double gamma) {
  KernelSpec kernel;
  if (kind == "linear") {
    kernel.kind = KernelSpec::Kind::linear;
  } else if (kind == "rbf") {
    kernel.kind = KernelSpec::Kind::rbf;
  } else {
    throw Error(ErrorCode::MalformedRecord, "kernel must be linear or rbf");
  }
  kernel.gamma = gamma;
  return kernel;
}

py::dict report_to_dict(const EvalReport& report) {
  py::dict out;
  py::list classes;
  for (ManeuverLabel label : report.class_list) classes.append(name(label));
  out["class_list"] = classes;
  out["confusion"] = report.confusion;
  py::dict per_class;
  for (std::size_t c = 0; c < report.class_list.size(); ++c) {
    py::dict m;
    m["precision"] = report.precision[c];
    m["recall"] = report.recall[c];
    m["f1"] = report.f1[c];
    per_class[name(report.class_list[c])] = m;
  }
  out["per_class"] = per_class;
  out["macro_precision"] = report.macro_precision;
  out["macro_recall"] = report.macro_recall;
  out["macro_f1"] = report.macro_f1;
  out["n_test"] = report.n_test;
  return out;
}

GeneratorConfig make_config(std::uint64_t seed,
                            const std::optional<py::dict>& class_counts,
                            double noise_scale, double gps_rate_hz,
                            double can_rate_hz) {
  GeneratorConfig config;
  config.seed = seed;
  config.noise_scale = noise_scale;
  config.gps_rate_hz = gps_rate_hz;
  config.can_rate_hz = can_rate_hz;
  if (class_counts) {
    for (const auto& item : *class_counts) {
      const ManeuverLabel label =
          parse_label(item.first.cast<std::string>());
      config.class_counts[static_cast<int>(label)] =
          item.second.cast<std::size_t>();
    }
  }
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CAN+GPS driving logs to maneuver classifiers";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("label_names", [] {
    std::vector<std::string> out;
    for (ManeuverLabel label : kAllLabels) out.emplace_back(name(label));
    return out;
  });
  m.def("feature_names", [] { return feature_names(); });

  // --- ingest ---------------------------------------------------------
  m.def(
      "parse_can_trace",
      [](const std::string& text) {
        std::istringstream in(text);
        const CanTrace trace = parse_can_trace(in);
        py::dict channels;
        for (const auto& series : trace.series) {
          py::dict s;
          s["unit"] = series.unit;
          std::vector<double> t, v;
          for (const auto& sample : series.samples) {
            t.push_back(sample.t);
            v.push_back(sample.value);
          }
          s["t"] = t;
          s["value"] = v;
          channels[series.name.c_str()] = s;
        }
        py::dict out;
        out["channels"] = channels;
        out["unknown_records"] = trace.unknown_records;
        return out;
      },
      py::arg("text"));
  m.def(
      "parse_gps_log",
      [](const std::string& text) {
        std::istringstream in(text);
        py::list out;
        for (const GpsFix& fix : parse_gps_log(in)) {
          py::dict d;
          d["t"] = fix.t;
          d["latitude"] = fix.latitude;
          d["longitude"] = fix.longitude;
          d["ground_speed"] = fix.ground_speed;
          d["heading"] = fix.heading;
          out.append(d);
        }
        return out;
      },
      py::arg("text"));

  // --- time sync ------------------------------------------------------
  m.def("resample_cubic",
        [](const std::vector<double>& t, const std::vector<double>& y,
           const std::vector<double>& grid) {
          return resample_cubic(t, y, grid);
        },
        py::arg("t"), py::arg("y"), py::arg("grid"));
  m.def("unwrap_angle", &unwrap_angle, py::arg("degrees"));
  m.def("wrap_360", &wrap_360, py::arg("degrees"));

  py::class_<FrameTable>(m, "FrameTable")
      .def_readonly("t0", &FrameTable::t0)
      .def_readonly("dt", &FrameTable::dt)
      .def_readonly("n_rows", &FrameTable::n_rows)
      .def("timestamps",
           [](const FrameTable& t) {
             std::vector<double> out;
             for (std::size_t i = 0; i < t.n_rows; ++i) {
               out.push_back(t.time_at(i));
             }
             return out;
           })
      .def("column_names",
           [](const FrameTable&) {
             std::vector<std::string> out;
             for (int c = 0; c < kNumFrameColumns; ++c) {
               out.emplace_back(frame_column_name(c));
             }
             return out;
           })
      .def("column",
           [](const FrameTable& t, const std::string& name) {
             for (int c = 0; c < kNumFrameColumns; ++c) {
               if (name == frame_column_name(c)) return t.columns[c];
             }
             throw Error(ErrorCode::MissingChannel,
                         "no column '" + name + "'");
           },
           py::arg("name"))
      .def("to_csv",
           [](const FrameTable& t) {
             std::ostringstream out;
             write_frame_csv(t, out);
             return out.str();
           })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream in(text);
        return read_frame_csv(in);
      });

  m.def(
      "sync_logs",
      [](const std::string& can_text, const std::string& gps_text) {
        std::istringstream can_in(can_text);
        const CanTrace trace = parse_can_trace(can_in);
        std::istringstream gps_in(gps_text);
        return align_streams(trace.series, parse_gps_log(gps_in));
      },
      py::arg("can_text"), py::arg("gps_text"));

  // --- windows --------------------------------------------------------
  py::class_<ManeuverWindow>(m, "ManeuverWindow")
      .def_property_readonly(
          "label", [](const ManeuverWindow& w) { return name(w.label); })
      .def_readonly("t_label", &ManeuverWindow::t_label)
      .def_readonly("frames", &ManeuverWindow::frames);

  m.def(
      "extract_windows",
      [](const FrameTable& table,
         const std::vector<std::pair<double, std::string>>& events) {
        std::vector<LabelEvent> parsed;
        for (const auto& [t, label] : events) {
          parsed.push_back({t, parse_label(label)});
        }
        const WindowExtraction out = extract_windows(table, parsed);
        py::list skipped;
        for (const auto& skip : out.skipped) {
          skipped.append(py::make_tuple(skip.event.t_label,
                                        name(skip.event.label), skip.reason));
        }
        return py::make_tuple(out.windows, skipped);
      },
      py::arg("table"), py::arg("events"));
  m.def("write_subtrip", &write_subtrip, py::arg("window"), py::arg("root"));
  m.def("read_subtrip", &read_subtrip, py::arg("directory"));
  m.def("read_subtrip_dir", &read_subtrip_dir, py::arg("root"));

  // --- features -------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly(
          "feature_names",
          [](const Dataset& ds) { return ds.feature_names; })
      .def_property_readonly("n_rows",
                             [](const Dataset& ds) { return ds.rows.size(); })
      .def("rows",
           [](const Dataset& ds) {
             py::list out;
             for (const auto& row : ds.rows) {
               out.append(py::make_tuple(row.values, name(row.label)));
             }
             return out;
           })
      .def("class_counts",
           [](const Dataset& ds) {
             py::dict out;
             for (ManeuverLabel label : kAllLabels) {
               out[name(label)] = ds.class_counts[static_cast<int>(label)];
             }
             return out;
           })
      .def("to_csv",
           [](const Dataset& ds) {
             std::ostringstream out;
             write_dataset_csv(ds, out);
             return out.str();
           })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream in(text);
        return read_dataset_csv(in);
      });

  m.def("featurize_window",
        [](const ManeuverWindow& window) {
          const FeatureVector fv = featurize_window(window);
          return py::make_tuple(fv.values, name(fv.label));
        },
        py::arg("window"));
  m.def("build_dataset", &build_dataset, py::arg("windows"));

  // --- synth ----------------------------------------------------------
  m.def(
      "generate_maneuver",
      [](const std::string& label, std::uint64_t seed, double noise_scale,
         double t_start) {
        GeneratorConfig config;
        config.noise_scale = noise_scale;
        Rng rng(seed);
        const GeneratedTrip trip =
            generate_maneuver(parse_label(label), config, rng, t_start);
        return py::make_tuple(trip.can_trace, trip.gps_log,
                              trip.event.t_label);
      },
      py::arg("label"), py::arg("seed"), py::arg("noise_scale") = 1.0,
      py::arg("t_start") = 1700000000.0);
  m.def(
      "generate_dataset",
      [](const std::filesystem::path& out_dir, std::uint64_t seed,
         const std::optional<py::dict>& class_counts, double noise_scale,
         double gps_rate_hz, double can_rate_hz) {
        return generate_dataset(make_config(seed, class_counts, noise_scale,
                                            gps_rate_hz, can_rate_hz),
                                out_dir);
      },
      py::arg("out_dir"), py::arg("seed") = 42,
      py::arg("class_counts") = std::nullopt, py::arg("noise_scale") = 1.0,
      py::arg("gps_rate_hz") = 1.0, py::arg("can_rate_hz") = 10.0);

  // --- models ---------------------------------------------------------
  py::class_<ForestModel>(m, "ForestModel")
      .def("predict",
           [](const ForestModel& model, const std::vector<double>& x) {
             return name(predict_forest(model, x));
           },
           py::arg("values"))
      .def("to_json", &forest_to_json)
      .def_static("from_json", [](const std::string& text) {
        // heap-return: the model is move-only (it owns its tree nodes)
        return std::make_unique<ForestModel>(forest_from_json(text));
      });

  py::class_<SvmModel>(m, "SvmModel")
      .def("predict",
           [](const SvmModel& model, const std::vector<double>& x) {
             return name(predict_svm(model, x));
           },
           py::arg("values"))
      .def("to_json", &svm_to_json)
      .def_static("from_json", &svm_from_json);

  m.def(
      "train_forest",
      [](const Dataset& data, std::size_t n_trees, std::size_t max_depth,
         std::size_t min_samples_split, std::size_t max_features,
         std::uint64_t seed) {
        ForestHyperparams hp;
        hp.n_trees = n_trees;
        if (max_depth > 0) hp.max_depth = max_depth;
        hp.min_samples_split = min_samples_split;
        hp.max_features = max_features;
        hp.seed = seed;
        return std::make_unique<ForestModel>(train_forest(data, hp));
      },
      py::arg("data"), py::arg("n_trees") = 100, py::arg("max_depth") = 0,
      py::arg("min_samples_split") = 2, py::arg("max_features") = 8,
      py::arg("seed") = 0);
  m.def(
      "train_svm",
      [](const Dataset& data, const std::string& kernel, double gamma,
         double C, double tol, std::size_t max_passes, std::uint64_t seed) {
        SmoParams params;
        params.C = C;
        params.tol = tol;
        params.max_passes = max_passes;
        params.seed = seed;
        return train_svm(data, parse_kernel(kernel, gamma), params);
      },
      py::arg("data"), py::arg("kernel") = "rbf", py::arg("gamma") = 0.0,
      py::arg("C") = 1.0, py::arg("tol") = 1e-3, py::arg("max_passes") = 5,
      py::arg("seed") = 0);

  // --- evaluation -----------------------------------------------------
  m.def(
      "split_stratified",
      [](const Dataset& data, double test_fraction, std::uint64_t seed) {
        return split_stratified(data, test_fraction, seed);
      },
      py::arg("data"), py::arg("test_fraction"), py::arg("seed"));
  m.def(
      "evaluate",
      [](const ForestModel& model, const Dataset& test) {
        return report_to_dict(evaluate(
            [&](std::span<const double> x) { return predict_forest(model, x); },
            test));
      },
      py::arg("model"), py::arg("test"));
  m.def(
      "evaluate",
      [](const SvmModel& model, const Dataset& test) {
        return report_to_dict(evaluate(
            [&](std::span<const double> x) { return predict_svm(model, x); },
            test));
      },
      py::arg("model"), py::arg("test"));
}
