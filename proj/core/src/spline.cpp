#include "trajsim/spline.hpp"

#include <algorithm>
#include <cstddef>

#include "trajsim/error.hpp"

namespace trajsim {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw Error("spline: need >= 2 knots with matching values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error("spline: knots must be strictly increasing");

  // Solve the tridiagonal system for interior second derivatives (Thomas
  // algorithm); natural boundary: m_0 = m_{n-1} = 0.
  m_.assign(n, 0.0);
  if (n > 2) {
    const std::size_t m = n - 2;  // unknowns
    std::vector<double> diag(m), rhs(m), upper(m);
    for (std::size_t i = 0; i < m; ++i) {
      double h0 = x_[i + 1] - x_[i];
      double h1 = x_[i + 2] - x_[i + 1];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0);
    }
    for (std::size_t i = 1; i < m; ++i) {
      double lower = x_[i + 1] - x_[i];  // sub-diagonal h_i
      double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
  }
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  // segment index: largest i with x_[i] <= x, clamped to [0, n-2]
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i > n - 2) i = n - 2;

  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - x) / h;
  double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
}

}  // namespace trajsim
