#pragma once

#include <vector>

#include "trajsim/geo.hpp"

namespace trajsim {

/// Planar point for the sequence distances; lng/lat are used directly as
/// x/y axes (consistent with the raster module's treatment).
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using PointSeq = std::vector<Point2>;

PointSeq to_point_seq(const Trajectory& traj);

/// Unconstrained dynamic time warping with Euclidean ground distance:
/// minimum cumulative distance over monotone warping paths. O(|a|*|b|) with
/// a two-row table. Throws on empty input.
double dtw(const PointSeq& a, const PointSeq& b);

/// Discrete Frechet distance (max-of-mins coupling DP). Throws on empty input.
double frechet_discrete(const PointSeq& a, const PointSeq& b);

}  // namespace trajsim
