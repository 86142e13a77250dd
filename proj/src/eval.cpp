#include "maneuverkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "maneuverkit/error.hpp"
#include "maneuverkit/rng.hpp"

namespace mkit {

namespace {

using nlohmann::json;

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.rows.reserve(rows.size());
  for (std::size_t r : rows) {
    out.rows.push_back(data.rows[r]);
    out.class_counts[static_cast<int>(data.rows[r].label)]++;
  }
  return out;
}

}  // namespace

double EvalReport::f1_of(ManeuverLabel label) const {
  for (std::size_t k = 0; k < class_list.size(); ++k) {
    if (class_list[k] == label) return f1[k];
  }
  return 0.0;
}

std::pair<Dataset, Dataset> split_stratified(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::RangeViolation,
                "test fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<std::size_t> test_rows, train_rows;
  for (ManeuverLabel label : kAllLabels) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      if (data.rows[i].label == label) rows.push_back(i);
    }
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall,
                  std::string("class '") + name(label) +
                      "' has fewer than 2 rows");
    }
    rng.shuffle(rows);
    const std::size_t n_test = static_cast<std::size_t>(
        std::ceil(static_cast<double>(rows.size()) * test_fraction));
    test_rows.insert(test_rows.end(), rows.begin(),
                     rows.begin() + static_cast<long>(n_test));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<long>(n_test),
                      rows.end());
  }
  // keep the original row order inside each side
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {take_rows(data, train_rows), take_rows(data, test_rows)};
}

EvalReport evaluate(const PredictFn& predict, const Dataset& test) {
  if (test.rows.empty()) {
    throw Error(ErrorCode::EmptyInput, "empty test set");
  }
  EvalReport report;
  report.class_list.assign(kAllLabels.begin(), kAllLabels.end());
  const std::size_t k = report.class_list.size();
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  report.n_test = test.rows.size();

  for (const FeatureVector& row : test.rows) {
    const ManeuverLabel predicted = predict(row.values);
    report.confusion[static_cast<int>(row.label)]
                    [static_cast<int>(predicted)]++;
  }

  report.precision.assign(k, 0.0);
  report.recall.assign(k, 0.0);
  report.f1.assign(k, 0.0);
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row_sum = 0, col_sum = 0;
    for (std::size_t o = 0; o < k; ++o) {
      row_sum += report.confusion[c][o];
      col_sum += report.confusion[o][c];
    }
    const double diag = static_cast<double>(report.confusion[c][c]);
    report.precision[c] =
        col_sum > 0 ? diag / static_cast<double>(col_sum) : 0.0;
    report.recall[c] = row_sum > 0 ? diag / static_cast<double>(row_sum) : 0.0;
    const double pr = report.precision[c] + report.recall[c];
    report.f1[c] =
        pr > 0.0 ? 2.0 * report.precision[c] * report.recall[c] / pr : 0.0;
    if (row_sum > 0) {
      // macro averages run over classes present in the test set
      ++present;
      report.macro_precision += report.precision[c];
      report.macro_recall += report.recall[c];
      report.macro_f1 += report.f1[c];
    }
  }
  report.macro_precision /= static_cast<double>(present);
  report.macro_recall /= static_cast<double>(present);
  report.macro_f1 /= static_cast<double>(present);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  json classes = json::array();
  for (ManeuverLabel label : report.class_list) classes.push_back(name(label));
  j["class_list"] = std::move(classes);
  j["confusion"] = report.confusion;
  json per_class;
  for (std::size_t c = 0; c < report.class_list.size(); ++c) {
    json m;
    m["precision"] = report.precision[c];
    m["recall"] = report.recall[c];
    m["f1"] = report.f1[c];
    per_class[name(report.class_list[c])] = std::move(m);
  }
  j["per_class"] = std::move(per_class);
  j["macro_precision"] = report.macro_precision;
  j["macro_recall"] = report.macro_recall;
  j["macro_f1"] = report.macro_f1;
  j["n_test"] = report.n_test;
  return j.dump(2);
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  out << "confusion matrix (rows = true, columns = predicted)\n";
  out << "                       ";
  for (ManeuverLabel label : report.class_list) {
    std::string n = name(label);
    out << ' ' << (n.size() > 6 ? n.substr(0, 6) : n);
    for (std::size_t p = n.size() > 6 ? 6 : n.size(); p < 6; ++p) out << ' ';
  }
  out << '\n';
  for (std::size_t c = 0; c < report.class_list.size(); ++c) {
    std::string n = name(report.class_list[c]);
    n.resize(22, ' ');
    out << n << ' ';
    for (std::size_t o = 0; o < report.class_list.size(); ++o) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), " %6zu", report.confusion[c][o]);
      out << buf;
    }
    out << '\n';
  }
  out << "\nclass                   precision  recall      f1\n";
  for (std::size_t c = 0; c < report.class_list.size(); ++c) {
    std::string n = name(report.class_list[c]);
    n.resize(22, ' ');
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s  %9.3f %7.3f %7.3f\n", n.c_str(),
                  report.precision[c], report.recall[c], report.f1[c]);
    out << buf;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "macro                   %9.3f %7.3f %7.3f   (n_test=%zu)\n",
                report.macro_precision, report.macro_recall, report.macro_f1,
                report.n_test);
  out << buf;
  return out.str();
}

void write_confusion_csv(const EvalReport& report, std::ostream& out) {
  out << "true\\predicted";
  for (ManeuverLabel label : report.class_list) out << ',' << name(label);
  out << '\n';
  for (std::size_t c = 0; c < report.class_list.size(); ++c) {
    out << name(report.class_list[c]);
    for (std::size_t o = 0; o < report.class_list.size(); ++o) {
      out << ',' << report.confusion[c][o];
    }
    out << '\n';
  }
}

}  // namespace mkit
