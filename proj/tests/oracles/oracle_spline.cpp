#include "oracle_spline.hpp"

#include <cstddef>
#include <stdexcept>

namespace oracle {

CoeffSpline::CoeffSpline(const std::vector<double>& x, const std::vector<double>& y) : x_(x), a_(y) {
  if (x.size() < 2 || x.size() != y.size()) throw std::invalid_argument("CoeffSpline: bad knots");
  const std::size_t n = x.size() - 1;  // segments
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = x[i + 1] - x[i];

  std::vector<double> alpha(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    alpha[i] = 3.0 * (a_[i + 1] - a_[i]) / h[i] - 3.0 * (a_[i] - a_[i - 1]) / h[i - 1];

  std::vector<double> l(n + 1), mu(n + 1), z(n + 1);
  l[0] = 1.0;
  mu[0] = 0.0;
  z[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    l[i] = 2.0 * (x[i + 1] - x[i - 1]) - h[i - 1] * mu[i - 1];
    mu[i] = h[i] / l[i];
    z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
  }
  l[n] = 1.0;
  z[n] = 0.0;

  c_.assign(n + 1, 0.0);
  b_.assign(n, 0.0);
  d_.assign(n, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    c_[j] = z[j] - mu[j] * c_[j + 1];
    b_[j] = (a_[j + 1] - a_[j]) / h[j] - h[j] * (c_[j + 1] + 2.0 * c_[j]) / 3.0;
    d_[j] = (c_[j + 1] - c_[j]) / (3.0 * h[j]);
  }
}

double CoeffSpline::operator()(double t) const {
  std::size_t j = 0;
  while (j + 2 < x_.size() && x_[j + 1] <= t) ++j;
  double dt = t - x_[j];
  return a_[j] + b_[j] * dt + c_[j] * dt * dt + d_[j] * dt * dt * dt;
}

}  // namespace oracle
