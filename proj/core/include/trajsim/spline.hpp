#pragma once

#include <vector>

namespace trajsim {

/// Natural cubic spline through (x_i, y_i) knots: second derivative zero at
/// both ends, C2 in between. Evaluation outside [x_front, x_back] clamps to
/// the boundary segments (callers never extrapolate).
class CubicSpline {
 public:
  /// Knot abscissae must be strictly increasing, size >= 2. With exactly 2 or
  /// 3 knots the natural spline degenerates as expected (single cubic/line).
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::size_t knot_count() const { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at knots
};

}  // namespace trajsim
