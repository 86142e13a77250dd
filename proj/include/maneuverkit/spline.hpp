#pragma once

#include <span>
#include <vector>

#include "maneuverkit/signal.hpp"

namespace mkit {

/// Natural cubic spline (zero second derivative at both ends) through
/// strictly ascending knots.
class CubicSpline {
 public:
  /// Requires x strictly ascending, x.size() == y.size() >= 2.
  CubicSpline(std::span<const double> x, std::span<const double> y);

  /// Evaluate at t. t must lie within [x.front() - eps, x.back() + eps]
  /// with eps = 1e-9; values within eps of a knot return the knot value
  /// exactly.
  double operator()(double t) const;

  double t_min() const { return x_.front(); }
  double t_max() const { return x_.back(); }

  static constexpr double kKnotEps = 1e-9;

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

/// Resample a series onto an arbitrary grid with a natural cubic spline.
/// Throws TooFewSamples if the series has fewer than 4 samples and
/// GridOutOfRange (citing the first offending point) if any grid point
/// falls outside the sample coverage.
std::vector<double> resample_cubic(std::span<const double> t,
                                   std::span<const double> y,
                                   std::span<const double> grid);

std::vector<double> resample_cubic(const SignalSeries& series,
                                   std::span<const double> grid);

}  // namespace mkit
