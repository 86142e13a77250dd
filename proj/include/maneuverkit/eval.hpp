#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maneuverkit/features.hpp"

namespace mkit {

/// K x K confusion counts (rows = true class, columns = predicted) with
/// per-class and macro precision/recall/F1. Row and column order follow
/// class_list, which always carries the full label enumeration.
struct EvalReport {
  std::vector<ManeuverLabel> class_list;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<double> precision, recall, f1;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  std::size_t n_test = 0;

  double f1_of(ManeuverLabel label) const;
};

/// Per class: shuffle with the seed and send ceil(count * test_fraction)
/// rows (at least 1) to test. Train and test are disjoint, exhaustive and
/// keep the original row order. Throws ClassTooSmall (naming the class)
/// when a class has fewer than 2 rows.
std::pair<Dataset, Dataset> split_stratified(const Dataset& data,
                                             double test_fraction,
                                             std::uint64_t seed);

using PredictFn = std::function<ManeuverLabel(std::span<const double>)>;

/// Fill the confusion matrix by counting (true, predicted) pairs. Empty
/// columns yield precision 0; macro averages run over classes present in
/// the test set. Throws EmptyInput.
EvalReport evaluate(const PredictFn& predict, const Dataset& test);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
void write_confusion_csv(const EvalReport& report, std::ostream& out);

}  // namespace mkit
