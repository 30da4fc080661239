#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace oracle {

/// SSIM evaluated from separately computed moments, straight off the formula.
inline double ssim_moments(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (double v : x) mx += v;
  for (double v : y) my += v;
  mx /= n;
  my /= n;
  double vx = 0, vy = 0, cov = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
    cov += (x[i] - mx) * (y[i] - my);
  }
  vx /= n;
  vy /= n;
  cov /= n;
  const double c1 = 1e-4, c2 = 9e-4;
  return ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

inline double mae_direct(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

inline double half_sq_direct(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return 0.5 * s;
}

}  // namespace oracle
