#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maneuverkit/features.hpp"

namespace mkit {

struct KernelSpec {
  enum class Kind { linear, rbf };
  Kind kind = Kind::rbf;
  double gamma = 0.0;  // rbf only; <= 0 selects the 1/d default at training
};

/// linear: a.b    rbf: exp(-gamma * |a-b|^2)
double kernel_eval(const KernelSpec& kernel, std::span<const double> a,
                   std::span<const double> b);

struct SmoParams {
  double C = 1.0;
  double tol = 1e-3;
  std::size_t max_passes = 5;     // consecutive zero-update sweeps to stop
  std::size_t max_sweeps = 2000;  // hard budget; exceeding it flags failure
  std::uint64_t seed = 0;         // drives the random pairing fallbacks
};

/// Raw SMO output over the full training set (zero alphas included), used
/// for KKT diagnostics.
struct SmoResult {
  std::vector<double> alphas;
  double bias = 0.0;
  bool converged = false;
};

struct BinarySvm {
  std::vector<std::vector<double>> support_vectors;  // alpha > 0 only
  std::vector<double> alphas;
  std::vector<double> signs;  // +-1 labels of the support vectors
  double bias = 0.0;
  KernelSpec kernel;
  double C = 1.0;

  double decision(std::span<const double> x) const;
};

/// Soft-margin dual solved by pairwise coordinate ascent: a KKT-violating
/// alpha_i pairs with the alpha_j maximizing |E_i - E_j| among non-bound
/// candidates (falling back to a random non-bound point, then any random
/// point), the pair updates analytically under the box and equality
/// constraints, and b follows from the non-bound support conditions.
/// Terminates after max_passes consecutive full sweeps with zero updates.
/// Throws SingleClass; a model that stops with violations remaining comes
/// back with converged = false.
SmoResult smo_solve(const std::vector<std::vector<double>>& points,
                    const std::vector<double>& targets,
                    const KernelSpec& kernel, const SmoParams& params);

BinarySvm make_binary_svm(const std::vector<std::vector<double>>& points,
                          const std::vector<double>& targets,
                          const KernelSpec& kernel, const SmoParams& params,
                          const SmoResult& result);

struct SvmModel {
  KernelSpec kernel;
  double C = 1.0;
  std::vector<ManeuverLabel> class_list;
  std::vector<BinarySvm> machines;  // one-vs-rest, class_list order
  std::vector<double> scale_mean, scale_std;
  std::size_t n_features = 0;
};

/// +1 for rows of `positive`, -1 for the rest.
std::vector<double> ovr_targets(const Dataset& data, ManeuverLabel positive);

/// One-vs-rest training on standardized features (zero-variance features
/// pass through unscaled). Machine k trains with seed ^ k.
/// Throws SingleClass or NoConvergence (naming the class).
SvmModel train_svm(const Dataset& data, const KernelSpec& kernel,
                   const SmoParams& params);

/// argmax of the per-class decision values; ties break toward the lowest
/// class index. Throws DimensionMismatch.
ManeuverLabel predict_svm(const SvmModel& model, std::span<const double> x);

std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const std::string& text);

}  // namespace mkit
