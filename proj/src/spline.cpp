#include "maneuverkit/spline.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "io_util.hpp"
#include "maneuverkit/error.hpp"

namespace mkit {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
  assert(x.size() == y.size() && x.size() >= 2);
  const std::size_t n = x_.size();
  if (n == 2) return;  // natural spline of two points is the chord, m = 0

  // Thomas algorithm on the tridiagonal second-derivative system with
  // natural end conditions m[0] = m[n-1] = 0.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = (x_[i] - x_[i - 1]) / 6.0;
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
  }
}

double CubicSpline::operator()(double t) const {
  const std::size_t n = x_.size();
  // snap to a knot when within tolerance so grid points that coincide with
  // sample times reproduce the sample exactly
  auto it = std::lower_bound(x_.begin(), x_.end(), t);
  if (it != x_.end() && std::abs(*it - t) <= kKnotEps)
    return y_[static_cast<std::size_t>(it - x_.begin())];
  if (it != x_.begin() && std::abs(*(it - 1) - t) <= kKnotEps)
    return y_[static_cast<std::size_t>(it - 1 - x_.begin())];

  std::size_t i;
  if (it == x_.begin())
    i = 0;
  else if (it == x_.end())
    i = n - 2;
  else
    i = static_cast<std::size_t>(it - x_.begin()) - 1;

  const double h = x_[i + 1] - x_[i];
  const double u = t - x_[i];
  const double slope =
      (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
  return y_[i] + u * (slope + u * (m_[i] / 2.0 +
                                   u * (m_[i + 1] - m_[i]) / (6.0 * h)));
}

std::vector<double> resample_cubic(std::span<const double> t,
                                   std::span<const double> y,
                                   std::span<const double> grid) {
  if (t.size() < 4) {
    throw Error(ErrorCode::TooFewSamples,
                "cubic resampling needs >= 4 samples, got " +
                    std::to_string(t.size()));
  }
  const double lo = t.front() - CubicSpline::kKnotEps;
  const double hi = t.back() + CubicSpline::kKnotEps;
  for (double g : grid) {
    if (g < lo || g > hi) {
      throw Error(ErrorCode::GridOutOfRange,
                  "grid point " + detail::format_double(g) +
                      " outside sample coverage [" +
                      detail::format_double(t.front()) + ", " +
                      detail::format_double(t.back()) + "]");
    }
  }
  const CubicSpline spline(t, y);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) out.push_back(spline(g));
  return out;
}

std::vector<double> resample_cubic(const SignalSeries& series,
                                   std::span<const double> grid) {
  std::vector<double> t, y;
  t.reserve(series.samples.size());
  y.reserve(series.samples.size());
  for (const SignalSample& s : series.samples) {
    t.push_back(s.t);
    y.push_back(s.value);
  }
  return resample_cubic(t, y, grid);
}

}  // namespace mkit
