#pragma once

#include <cstdint>
#include <vector>

#include "trajsim/baseline.hpp"
#include "trajsim/geo.hpp"

namespace trajsim {

/// One synthetic shipping lane. Trajectories follow the waypoint polyline at
/// a per-trajectory random speed and sampling interval, with per-point
/// Gaussian lateral jitter clamped to +-4 sigma (so a 4*sigma margin inside a
/// bounding box keeps every point inside it).
struct LaneSpec {
  std::vector<Point2> waypoints;  // x = lng, y = lat, degrees
  double jitter_sigma = 0.0;      // degrees
  double speed_min = 0.0;         // degrees of arc length per second
  double speed_max = 0.0;
  double interval_min = 1.0;  // seconds between samples
  double interval_max = 1.0;
  int count = 0;  // trajectories to generate
};

struct SynthResult {
  std::vector<Trajectory> trajectories;
  std::vector<int> labels;  // 1-based lane index per trajectory
};

/// Deterministic per (seed, lane, trajectory) triple: output is bit-identical
/// across runs and independent of generation order.
SynthResult generate(const std::vector<LaneSpec>& lanes, std::uint64_t seed);

}  // namespace trajsim
