#pragma once

#include <vector>

namespace oracle {

/// Natural cubic spline in textbook coefficient form (a,b,c,d per segment),
/// built with the l/mu/z recurrence. Independent of the production solver,
/// which works on second derivatives with a generic tridiagonal elimination.
class CoeffSpline {
 public:
  CoeffSpline(const std::vector<double>& x, const std::vector<double>& y);

  double operator()(double t) const;

 private:
  std::vector<double> x_, a_, b_, c_, d_;
};

}  // namespace oracle
