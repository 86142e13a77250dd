#include <doctest.h>

#include <cmath>
#include <numbers>

#include "maneuverkit/error.hpp"
#include "maneuverkit/rng.hpp"
#include "maneuverkit/svm.hpp"

using namespace mkit;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                     const std::vector<int>& labels) {
  Dataset ds;
  for (std::size_t f = 0; f < rows[0].size(); ++f) {
    ds.feature_names.push_back("f" + std::to_string(f));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FeatureVector fv;
    fv.values = rows[i];
    fv.label = static_cast<ManeuverLabel>(labels[i]);
    ds.rows.push_back(fv);
    ds.class_counts[labels[i]]++;
  }
  return ds;
}

double full_decision(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y, const SmoResult& r,
                     const KernelSpec& kernel,
                     std::span<const double> probe) {
  double f = r.bias;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (r.alphas[i] > 0.0) {
      f += r.alphas[i] * y[i] * kernel_eval(kernel, x[i], probe);
    }
  }
  return f;
}

void check_dual_feasible(const std::vector<double>& y, const SmoResult& r,
                         double c) {
  double sum = 0.0;
  for (std::size_t i = 0; i < r.alphas.size(); ++i) {
    CHECK(r.alphas[i] >= 0.0);
    CHECK(r.alphas[i] <= c);
    sum += r.alphas[i] * y[i];
  }
  CHECK(std::abs(sum) <= 1e-6);
}

void check_kkt(const std::vector<std::vector<double>>& x,
               const std::vector<double>& y, const SmoResult& r,
               const KernelSpec& kernel, double c, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double margin = y[i] * full_decision(x, y, r, kernel, x[i]);
    if (r.alphas[i] == 0.0) {
      CHECK(margin >= 1.0 - tol);
    } else if (r.alphas[i] == c) {
      CHECK(margin <= 1.0 + tol);
    } else {
      CHECK(std::abs(margin - 1.0) <= tol);
    }
  }
}

/// Brute-force maximum-margin separator for tiny 2-D sets: sweep the
/// direction angle finely, place the offset midway between the extreme
/// projections, and keep the best margin.
double bruteforce_margin_width(const std::vector<std::vector<double>>& x,
                               const std::vector<double>& y) {
  double best = 0.0;
  const int steps = 20000;
  for (int s = 0; s < steps; ++s) {
    const double theta = std::numbers::pi * s / steps;
    const double wx = std::cos(theta), wy = std::sin(theta);
    double min_pos = 1e300, max_neg = -1e300;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double proj = wx * x[i][0] + wy * x[i][1];
      if (y[i] > 0) {
        min_pos = std::min(min_pos, proj);
      } else {
        max_neg = std::max(max_neg, proj);
      }
    }
    best = std::max(best, min_pos - max_neg);  // full margin width
  }
  return best;
}

}  // namespace

TEST_CASE("kernel closed forms") {
  KernelSpec rbf{KernelSpec::Kind::rbf, 0.5};
  const std::vector<double> a = {1.0, 2.0}, b = {3.0, 4.0};
  CHECK(kernel_eval(rbf, a, a) == 1.0);
  KernelSpec linear{KernelSpec::Kind::linear, 0.0};
  CHECK(kernel_eval(linear, a, b) == 11.0);
  const std::vector<double> z = {0.0, 0.0}, o = {1.0, 1.0};
  CHECK(kernel_eval(rbf, z, o) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(kernel_eval(linear, a, std::vector<double>{1.0}), Error);
}

TEST_CASE("two symmetric points: boundary at the midpoint, equal alphas") {
  const std::vector<std::vector<double>> x = {{-1.0}, {1.0}};
  const std::vector<double> y = {-1.0, 1.0};
  KernelSpec kernel{KernelSpec::Kind::linear, 0.0};
  SmoParams params;
  params.C = 10.0;
  const SmoResult r = smo_solve(x, y, kernel, params);
  CHECK(r.converged);
  CHECK(std::abs(full_decision(x, y, r, kernel, std::vector<double>{0.0})) <
        1e-3);
  CHECK(r.alphas[0] > 0.0);
  CHECK(r.alphas[1] > 0.0);
  CHECK(r.alphas[0] == doctest::Approx(r.alphas[1]).epsilon(1e-9));
  check_dual_feasible(y, r, params.C);
  check_kkt(x, y, r, kernel, params.C, params.tol);
}

TEST_CASE("xor with an rbf kernel reaches zero training error") {
  const std::vector<std::vector<double>> x = {
      {0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}};
  const std::vector<double> y = {1.0, 1.0, -1.0, -1.0};
  KernelSpec kernel{KernelSpec::Kind::rbf, 1.0};
  SmoParams params;
  params.C = 10.0;
  const SmoResult r = smo_solve(x, y, kernel, params);
  CHECK(r.converged);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(y[i] * full_decision(x, y, r, kernel, x[i]) > 0.0);
  }
  check_dual_feasible(y, r, params.C);
  check_kkt(x, y, r, kernel, params.C, params.tol);
}

TEST_CASE("dual feasibility and KKT on random problems") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
      const double cls = i % 2 == 0 ? 1.0 : -1.0;
      x.push_back({cls * 1.5 + rng.normal(0.0, 1.0),
                   rng.normal(0.0, 1.0)});
      y.push_back(cls);
    }
    KernelSpec kernel{KernelSpec::Kind::rbf, 0.5};
    SmoParams params;
    params.C = 1.0;
    params.seed = trial;
    const SmoResult r = smo_solve(x, y, kernel, params);
    REQUIRE(r.converged);
    check_dual_feasible(y, r, params.C);
    check_kkt(x, y, r, kernel, params.C, params.tol);
  }
}

TEST_CASE("margin width matches a brute-force search within 2 percent") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    // separable six-point sets in 2-D
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    const double gap = 1.0 + rng.uniform(0.0, 1.0);
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double nx = std::cos(angle), ny = std::sin(angle);
    for (int i = 0; i < 6; ++i) {
      const double cls = i % 2 == 0 ? 1.0 : -1.0;
      const double along = rng.uniform(-2.0, 2.0);
      const double off = gap / 2.0 + rng.uniform(0.0, 1.5);
      x.push_back({cls * off * nx - along * ny, cls * off * ny + along * nx});
      y.push_back(cls);
    }
    KernelSpec kernel{KernelSpec::Kind::linear, 0.0};
    SmoParams params;
    params.C = 1e4;  // effectively hard margin
    params.seed = trial;
    const SmoResult r = smo_solve(x, y, kernel, params);
    REQUIRE(r.converged);

    // margin width from the dual solution: 2 / |w|
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      w0 += r.alphas[i] * y[i] * x[i][0];
      w1 += r.alphas[i] * y[i] * x[i][1];
    }
    const double width = 2.0 / std::hypot(w0, w1);
    const double oracle = bruteforce_margin_width(x, y);
    CHECK(width == doctest::Approx(oracle).epsilon(0.02));
  }
}

TEST_CASE("one-vs-rest on two classes gives sign-opposite machines") {
  Rng rng(23);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int cls = i % 2;
    rows.push_back({(cls == 0 ? -2.0 : 2.0) + rng.normal(0.0, 0.4),
                    rng.normal(0.0, 0.4)});
    labels.push_back(cls);
  }
  const Dataset ds = make_dataset(rows, labels);
  KernelSpec kernel{KernelSpec::Kind::rbf, 0.0};
  SmoParams params;
  const SvmModel model = train_svm(ds, kernel, params);
  REQUIRE(model.machines.size() == 2);
  Rng probe(5);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> x = {probe.uniform(-3.0, 3.0),
                             probe.uniform(-1.5, 1.5)};
    std::vector<double> scaled(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
      scaled[f] = (x[f] - model.scale_mean[f]) / model.scale_std[f];
    }
    const double f0 = model.machines[0].decision(scaled);
    const double f1 = model.machines[1].decision(scaled);
    CHECK(std::abs(f0 + f1) <= 2.0 * params.tol);
  }
}

TEST_CASE("training is deterministic per seed") {
  Rng rng(41);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 45; ++i) {
    const int cls = static_cast<int>(rng.below(3));
    rows.push_back({cls * 2.0 + rng.normal(0.0, 0.5),
                    (cls == 1 ? 2.0 : 0.0) + rng.normal(0.0, 0.5)});
    labels.push_back(cls);
  }
  const Dataset ds = make_dataset(rows, labels);
  KernelSpec kernel{KernelSpec::Kind::rbf, 0.0};
  SmoParams params;
  params.seed = 7;
  const SvmModel a = train_svm(ds, kernel, params);
  const SvmModel b = train_svm(ds, kernel, params);
  CHECK(svm_to_json(a) == svm_to_json(b));
  Rng probe(3);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x = {probe.uniform(-2.0, 6.0),
                                   probe.uniform(-2.0, 4.0)};
    CHECK(predict_svm(a, x) == predict_svm(b, x));
  }
}

TEST_CASE("feature rescaling leaves predictions unchanged") {
  Rng rng(51);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 2;
    rows.push_back({(cls == 0 ? -1.5 : 1.5) + rng.normal(0.0, 0.5),
                    rng.normal(0.0, 2.0)});
    labels.push_back(cls);
  }
  const Dataset base = make_dataset(rows, labels);
  std::vector<std::vector<double>> scaled_rows = rows;
  const double c = 250.0;
  for (auto& r : scaled_rows) {
    for (auto& v : r) v *= c;
  }
  const Dataset scaled = make_dataset(scaled_rows, labels);

  KernelSpec kernel{KernelSpec::Kind::rbf, 0.0};
  SmoParams params;
  params.seed = 11;
  const SvmModel m1 = train_svm(base, kernel, params);
  const SvmModel m2 = train_svm(scaled, kernel, params);
  Rng probe(13);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x = {probe.uniform(-3.0, 3.0),
                             probe.uniform(-5.0, 5.0)};
    std::vector<double> cx = x;
    for (auto& v : cx) v *= c;
    CHECK(predict_svm(m1, x) == predict_svm(m2, cx));
  }
}

TEST_CASE("prediction picks the machine with the largest decision value") {
  Rng rng(61);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    const int cls = static_cast<int>(rng.below(3));
    rows.push_back({cls * 3.0 + rng.normal(0.0, 0.4),
                    (cls == 2 ? 3.0 : 0.0) + rng.normal(0.0, 0.4)});
    labels.push_back(cls);
  }
  const Dataset ds = make_dataset(rows, labels);
  KernelSpec kernel{KernelSpec::Kind::rbf, 0.0};
  SmoParams params;
  SvmModel model = train_svm(ds, kernel, params);

  // the training point with the largest own-class decision value must be
  // predicted as that class
  double best = -1e300;
  std::size_t best_row = 0;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    std::vector<double> scaled(2);
    for (std::size_t f = 0; f < 2; ++f) {
      scaled[f] = (ds.rows[i].values[f] - model.scale_mean[f]) /
                  model.scale_std[f];
    }
    const int k = static_cast<int>(ds.rows[i].label);
    const double v = model.machines[k].decision(scaled);
    if (v > best) {
      best = v;
      best_row = i;
    }
  }
  CHECK(predict_svm(model, ds.rows[best_row].values) ==
        ds.rows[best_row].label);

  // bias hook: inflate one machine and it wins everywhere
  model.machines[2].bias += 1e9;
  for (int i = 0; i < 10; ++i) {
    CHECK(predict_svm(model, ds.rows[i].values) == model.class_list[2]);
  }
  // exact tie between two machines: the lower class index wins
  SvmModel tie = train_svm(ds, kernel, params);
  tie.machines[1] = tie.machines[0];
  const double f0 = [&] {
    std::vector<double> scaled(2);
    for (std::size_t f = 0; f < 2; ++f) {
      scaled[f] = (ds.rows[0].values[f] - tie.scale_mean[f]) /
                  tie.scale_std[f];
    }
    return tie.machines[0].decision(scaled);
  }();
  const double f2 = [&] {
    std::vector<double> scaled(2);
    for (std::size_t f = 0; f < 2; ++f) {
      scaled[f] = (ds.rows[0].values[f] - tie.scale_mean[f]) /
                  tie.scale_std[f];
    }
    return tie.machines[2].decision(scaled);
  }();
  if (f0 > f2) {
    CHECK(predict_svm(tie, ds.rows[0].values) == tie.class_list[0]);
  }
}

TEST_CASE("errors: single class and dimension mismatch") {
  const Dataset single = make_dataset({{0.0}, {1.0}}, {4, 4});
  try {
    train_svm(single, KernelSpec{}, SmoParams{});
    FAIL("expected SingleClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingleClass);
  }
  const Dataset two = make_dataset({{0.0}, {1.0}}, {0, 1});
  const SvmModel model = train_svm(two, KernelSpec{}, SmoParams{});
  try {
    predict_svm(model, std::vector<double>{0.0, 1.0});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("json round-trip preserves predictions exactly") {
  Rng rng(71);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 2;
    rows.push_back({cls * 2.0 + rng.normal(0.0, 0.6),
                    rng.normal(0.0, 0.6)});
    labels.push_back(cls + 3);
  }
  const Dataset ds = make_dataset(rows, labels);
  const SvmModel model = train_svm(ds, KernelSpec{}, SmoParams{});
  const SvmModel back = svm_from_json(svm_to_json(model));
  CHECK(back.class_list == model.class_list);
  Rng probe(9);
  for (int i = 0; i < 60; ++i) {
    const std::vector<double> x = {probe.uniform(-2.0, 4.0),
                                   probe.uniform(-2.0, 2.0)};
    CHECK(predict_svm(back, x) == predict_svm(model, x));
  }
}
