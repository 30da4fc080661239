#pragma once

#include "trajsim/geo.hpp"

namespace trajsim {

struct ResampleSpec {
  double interval = 5.0;  // seconds
};

/// Resamples a trajectory to timestamps t_1, t_1+d, ... up to the largest
/// value <= t_N. lat and lng are interpolated independently over t with a
/// natural cubic spline; trajectories with fewer than 4 points fall back to
/// linear interpolation (the cubic system is underdetermined there). Never
/// extrapolates.
///
/// Throws Error for trajectories with < 2 points or a non-positive interval.
Trajectory resample(const Trajectory& traj, const ResampleSpec& spec);

}  // namespace trajsim
