#include "trajsim/resample.hpp"

#include <cmath>
#include <vector>

#include "trajsim/error.hpp"
#include "trajsim/spline.hpp"

namespace trajsim {

namespace {

double lerp_at(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  std::size_t i = 0;
  while (i + 2 < ts.size() && ts[i + 1] <= t) ++i;
  double h = ts[i + 1] - ts[i];
  double w = (t - ts[i]) / h;
  return vs[i] + w * (vs[i + 1] - vs[i]);
}

}  // namespace

Trajectory resample(const Trajectory& traj, const ResampleSpec& spec) {
  if (!(spec.interval > 0.0)) throw Error("resample: interval must be > 0");
  const std::size_t n = traj.points.size();
  if (n < 2) throw Error("resample: trajectory too short (" + traj.id + ")");

  std::vector<double> ts(n), lats(n), lngs(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = traj.points[i].t;
    lats[i] = traj.points[i].lat;
    lngs[i] = traj.points[i].lng;
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw Error("resample: timestamps not strictly increasing (" + traj.id + ")");
  }

  const double t0 = ts.front();
  const double tN = ts.back();
  const double d = spec.interval;
  // Largest step count with t0 + k*d <= tN; 1e-9 absorbs quotient roundoff so
  // an input already sampled at exactly d keeps its final point.
  const auto steps = static_cast<std::size_t>(std::floor((tN - t0) / d + 1e-9));

  Trajectory out;
  out.id = traj.id;
  out.points.reserve(steps + 1);
  out.points.push_back(traj.points.front());  // first point exact

  if (n >= 4) {
    CubicSpline slat(ts, lats), slng(ts, lngs);
    for (std::size_t k = 1; k <= steps; ++k) {
      double t = std::min(t0 + static_cast<double>(k) * d, tN);
      out.points.push_back({slat(t), slng(t), t});
    }
  } else {
    for (std::size_t k = 1; k <= steps; ++k) {
      double t = std::min(t0 + static_cast<double>(k) * d, tN);
      out.points.push_back({lerp_at(ts, lats, t), lerp_at(ts, lngs, t), t});
    }
  }
  return out;
}

}  // namespace trajsim
