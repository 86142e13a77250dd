#include "maneuverkit/svm.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "maneuverkit/error.hpp"
#include "maneuverkit/rng.hpp"

namespace mkit {

namespace {

using nlohmann::json;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

constexpr double kBoundSnap = 1e-10;  // absolute, relative to alpha scale

/// Working state of one SMO run over a precomputed kernel matrix.
struct SmoState {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  const std::vector<double>& k;  // n*n kernel matrix, row-major
  std::size_t n;
  double c;
  double tol;
  std::vector<double> alpha;
  std::vector<double> err;  // err[i] = f(x_i) - y_i
  double bias = 0.0;
  Rng rng;

  SmoState(const std::vector<std::vector<double>>& x_,
           const std::vector<double>& y_, const std::vector<double>& k_,
           double c_, double tol_, std::uint64_t seed)
      : x(x_), y(y_), k(k_), n(x_.size()), c(c_), tol(tol_),
        alpha(n, 0.0), err(n), rng(seed) {
    for (std::size_t i = 0; i < n; ++i) err[i] = -y[i];  // f = 0 initially
  }

  double km(std::size_t i, std::size_t j) const { return k[i * n + j]; }

  bool non_bound(std::size_t i) const {
    return alpha[i] > 0.0 && alpha[i] < c;
  }

  bool violates_kkt(std::size_t i) const {
    const double r = err[i] * y[i];
    return (r < -tol && alpha[i] < c) || (r > tol && alpha[i] > 0.0);
  }

  /// Analytic update of the pair (i, j). Returns false when the step is
  /// degenerate or makes no progress.
  bool take_step(std::size_t i, std::size_t j) {
    if (i == j) return false;
    const double ai_old = alpha[i], aj_old = alpha[j];
    const double yi = y[i], yj = y[j];
    const double ei = err[i], ej = err[j];

    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj_old - ai_old);
      hi = std::min(c, c + aj_old - ai_old);
    } else {
      lo = std::max(0.0, ai_old + aj_old - c);
      hi = std::min(c, ai_old + aj_old);
    }
    if (lo >= hi) return false;

    const double eta = km(i, i) + km(j, j) - 2.0 * km(i, j);
    if (eta <= 0.0) return false;

    double aj = aj_old + yj * (ei - ej) / eta;
    aj = std::clamp(aj, lo, hi);
    if (std::abs(aj - aj_old) < 1e-7 * (aj + aj_old + 1e-7)) return false;

    double ai = ai_old + yi * yj * (aj_old - aj);
    // snap rounding residue onto the box so zero and C stay exact and the
    // KKT test never chases phantom support vectors
    if (ai < kBoundSnap) ai = 0.0;
    if (ai > c - kBoundSnap) ai = c;
    if (aj < kBoundSnap) aj = 0.0;
    if (aj > c - kBoundSnap) aj = c;

    const double di = yi * (ai - ai_old);
    const double dj = yj * (aj - aj_old);
    const double b1 = bias - ei - di * km(i, i) - dj * km(i, j);
    const double b2 = bias - ej - di * km(i, j) - dj * km(j, j);
    double new_bias;
    const bool i_free = ai > 0.0 && ai < c;
    const bool j_free = aj > 0.0 && aj < c;
    if (i_free && j_free) {
      new_bias = (b1 + b2) / 2.0;
    } else if (i_free) {
      new_bias = b1;
    } else if (j_free) {
      new_bias = b2;
    } else {
      new_bias = (b1 + b2) / 2.0;
    }

    const double db = new_bias - bias;
    for (std::size_t t = 0; t < n; ++t) {
      err[t] += di * km(i, t) + dj * km(j, t) + db;
    }
    alpha[i] = ai;
    alpha[j] = aj;
    bias = new_bias;
    return true;
  }

  /// Second-choice heuristic: the j maximizing |E_i - E_j| among non-bound
  /// points, then the non-bound points from a random start, then everyone
  /// from a random start.
  bool examine(std::size_t i) {
    std::size_t best = n;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !non_bound(j)) continue;
      const double gap = std::abs(err[i] - err[j]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < n && take_step(i, best)) return true;

    const std::size_t offset = static_cast<std::size_t>(rng.below(n));
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t j = (s + offset) % n;
      if (j == i || !non_bound(j)) continue;
      if (take_step(i, j)) return true;
    }
    const std::size_t offset2 = static_cast<std::size_t>(rng.below(n));
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t j = (s + offset2) % n;
      if (j == i) continue;
      if (take_step(i, j)) return true;
    }
    return false;
  }
};

}  // namespace

double kernel_eval(const KernelSpec& kernel, std::span<const double> a,
                   std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "kernel arguments differ in length: " +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  switch (kernel.kind) {
    case KernelSpec::Kind::linear:
      return dot(a, b);
    case KernelSpec::Kind::rbf:
      return std::exp(-kernel.gamma * squared_distance(a, b));
  }
  return 0.0;
}

SmoResult smo_solve(const std::vector<std::vector<double>>& points,
                    const std::vector<double>& targets,
                    const KernelSpec& kernel, const SmoParams& params) {
  const std::size_t n = points.size();
  bool has_pos = false, has_neg = false;
  for (double y : targets) (y > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::SingleClass,
                "SMO needs both +1 and -1 labels present");
  }

  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval(kernel, points[i], points[j]);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }

  SmoState state(points, targets, k, params.C, params.tol, params.seed);
  std::size_t zero_update_streak = 0;
  bool clean_sweep = false;  // last sweep saw no KKT violations at all
  for (std::size_t sweep = 0; sweep < params.max_sweeps; ++sweep) {
    std::size_t changed = 0;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!state.violates_kkt(i)) continue;
      ++violations;
      if (state.examine(i)) ++changed;
    }
    clean_sweep = violations == 0;
    zero_update_streak = changed == 0 ? zero_update_streak + 1 : 0;
    if (zero_update_streak >= params.max_passes) break;
  }

  SmoResult result;
  result.alphas = std::move(state.alpha);
  result.bias = state.bias;
  result.converged = clean_sweep;
  return result;
}

BinarySvm make_binary_svm(const std::vector<std::vector<double>>& points,
                          const std::vector<double>& targets,
                          const KernelSpec& kernel, const SmoParams& params,
                          const SmoResult& result) {
  BinarySvm svm;
  svm.kernel = kernel;
  svm.C = params.C;
  svm.bias = result.bias;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (result.alphas[i] > 0.0) {
      svm.support_vectors.push_back(points[i]);
      svm.alphas.push_back(result.alphas[i]);
      svm.signs.push_back(targets[i]);
    }
  }
  return svm;
}

double BinarySvm::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    f += alphas[i] * signs[i] * kernel_eval(kernel, support_vectors[i], x);
  }
  return f;
}

std::vector<double> ovr_targets(const Dataset& data, ManeuverLabel positive) {
  std::vector<double> y;
  y.reserve(data.rows.size());
  for (const FeatureVector& row : data.rows) {
    y.push_back(row.label == positive ? 1.0 : -1.0);
  }
  return y;
}

SvmModel train_svm(const Dataset& data, const KernelSpec& kernel,
                   const SmoParams& params) {
  SvmModel model;
  model.class_list = data.class_list();
  if (model.class_list.size() < 2) {
    throw Error(ErrorCode::SingleClass, "SVM training needs >= 2 classes");
  }
  const std::size_t d = data.feature_names.size();
  const std::size_t n = data.rows.size();
  model.n_features = d;
  model.C = params.C;
  model.kernel = kernel;
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.gamma <= 0.0) {
    model.kernel.gamma = 1.0 / static_cast<double>(d);
  }

  // standardize with training mean / population std; constant features
  // pass through unscaled
  model.scale_mean.assign(d, 0.0);
  model.scale_std.assign(d, 1.0);
  for (std::size_t f = 0; f < d; ++f) {
    double sum = 0.0;
    for (const FeatureVector& row : data.rows) sum += row.values[f];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const FeatureVector& row : data.rows) {
      const double dev = row.values[f] - mean;
      sq += dev * dev;
    }
    const double std_pop = std::sqrt(sq / static_cast<double>(n));
    model.scale_mean[f] = mean;
    model.scale_std[f] = std_pop > 0.0 ? std_pop : 1.0;
  }

  std::vector<std::vector<double>> scaled(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      scaled[i][f] =
          (data.rows[i].values[f] - model.scale_mean[f]) / model.scale_std[f];
    }
  }

  for (std::size_t kidx = 0; kidx < model.class_list.size(); ++kidx) {
    const ManeuverLabel label = model.class_list[kidx];
    const std::vector<double> y = ovr_targets(data, label);
    SmoParams per_class = params;
    per_class.seed = params.seed ^ static_cast<std::uint64_t>(kidx);
    const SmoResult result = smo_solve(scaled, y, model.kernel, per_class);
    if (!result.converged) {
      throw Error(ErrorCode::NoConvergence,
                  std::string("SMO did not converge for class '") +
                      name(label) + "'");
    }
    model.machines.push_back(
        make_binary_svm(scaled, y, model.kernel, per_class, result));
  }
  return model;
}

ManeuverLabel predict_svm(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(model.n_features) +
                    " features, got " + std::to_string(x.size()));
  }
  std::vector<double> scaled(model.n_features);
  for (std::size_t f = 0; f < model.n_features; ++f) {
    scaled[f] = (x[f] - model.scale_mean[f]) / model.scale_std[f];
  }
  std::size_t best = 0;
  double best_value = model.machines[0].decision(scaled);
  for (std::size_t k = 1; k < model.machines.size(); ++k) {
    const double v = model.machines[k].decision(scaled);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return model.class_list[best];
}

namespace {

json kernel_to_json(const KernelSpec& kernel) {
  json j;
  j["kind"] = kernel.kind == KernelSpec::Kind::linear ? "linear" : "rbf";
  j["gamma"] = kernel.gamma;
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec kernel;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    kernel.kind = KernelSpec::Kind::linear;
  } else if (kind == "rbf") {
    kernel.kind = KernelSpec::Kind::rbf;
  } else {
    throw Error(ErrorCode::MalformedRecord, "unknown kernel '" + kind + "'");
  }
  kernel.gamma = j.at("gamma").get<double>();
  return kernel;
}

}  // namespace

std::string svm_to_json(const SvmModel& model) {
  json j;
  j["model"] = "svm";
  j["kernel"] = kernel_to_json(model.kernel);
  j["C"] = model.C;
  j["n_features"] = model.n_features;
  json classes = json::array();
  for (ManeuverLabel label : model.class_list) classes.push_back(name(label));
  j["class_list"] = std::move(classes);
  j["scale_mean"] = model.scale_mean;
  j["scale_std"] = model.scale_std;
  json machines = json::array();
  for (const BinarySvm& m : model.machines) {
    json mj;
    mj["alphas"] = m.alphas;
    mj["signs"] = m.signs;
    mj["bias"] = m.bias;
    mj["support_vectors"] = m.support_vectors;
    machines.push_back(std::move(mj));
  }
  j["machines"] = std::move(machines);
  return j.dump();
}

SvmModel svm_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("model", "") != "svm") {
    throw Error(ErrorCode::MalformedRecord, "not an svm model document");
  }
  SvmModel model;
  model.kernel = kernel_from_json(j.at("kernel"));
  model.C = j.at("C").get<double>();
  model.n_features = j.at("n_features").get<std::size_t>();
  for (const json& c : j.at("class_list")) {
    const auto label = label_from_name(c.get<std::string>());
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "model class list carries unknown label '" +
                      c.get<std::string>() + "'");
    }
    model.class_list.push_back(*label);
  }
  model.scale_mean = j.at("scale_mean").get<std::vector<double>>();
  model.scale_std = j.at("scale_std").get<std::vector<double>>();
  for (const json& mj : j.at("machines")) {
    BinarySvm m;
    m.kernel = model.kernel;
    m.C = model.C;
    m.alphas = mj.at("alphas").get<std::vector<double>>();
    m.signs = mj.at("signs").get<std::vector<double>>();
    m.bias = mj.at("bias").get<double>();
    m.support_vectors =
        mj.at("support_vectors").get<std::vector<std::vector<double>>>();
    model.machines.push_back(std::move(m));
  }
  if (model.machines.size() != model.class_list.size()) {
    throw Error(ErrorCode::MalformedRecord, "svm model document incomplete");
  }
  return model;
}

}  // namespace mkit
