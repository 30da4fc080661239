#include "trajsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trajsim/error.hpp"

namespace trajsim {

namespace {

struct Polyline {
  std::vector<Point2> pts;
  std::vector<double> cum;  // cumulative arc length, cum[0] = 0

  double total() const { return cum.back(); }

  // position and unit normal at arc length s (clamped)
  std::pair<Point2, Point2> at(double s) const {
    s = std::clamp(s, 0.0, total());
    std::size_t i = 1;
    while (i + 1 < cum.size() && cum[i] < s) ++i;
    double seg = cum[i] - cum[i - 1];
    double w = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
    Point2 a = pts[i - 1], b = pts[i];
    Point2 pos{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
    double dx = (b.x - a.x) / seg, dy = (b.y - a.y) / seg;
    return {pos, Point2{-dy, dx}};
  }
};

Polyline build_polyline(const LaneSpec& lane) {
  if (lane.waypoints.size() < 2) throw Error("synth: lane needs >= 2 waypoints");
  Polyline p;
  p.pts = lane.waypoints;
  p.cum.resize(p.pts.size());
  p.cum[0] = 0.0;
  for (std::size_t i = 1; i < p.pts.size(); ++i) {
    double seg = std::hypot(p.pts[i].x - p.pts[i - 1].x, p.pts[i].y - p.pts[i - 1].y);
    if (!(seg > 0.0)) throw Error("synth: degenerate polyline (repeated waypoint)");
    p.cum[i] = p.cum[i - 1] + seg;
  }
  return p;
}

void check_lane(const LaneSpec& lane) {
  if (lane.count < 1) throw Error("synth: lane count must be >= 1");
  if (lane.jitter_sigma < 0.0) throw Error("synth: jitter sigma must be >= 0");
  if (!(lane.speed_min > 0.0) || lane.speed_max < lane.speed_min)
    throw Error("synth: invalid speed range");
  if (!(lane.interval_min > 0.0) || lane.interval_max < lane.interval_min)
    throw Error("synth: invalid sampling interval range");
}

}  // namespace

SynthResult generate(const std::vector<LaneSpec>& lanes, std::uint64_t seed) {
  if (lanes.empty()) throw Error("synth: no lanes");
  SynthResult res;
  for (std::size_t li = 0; li < lanes.size(); ++li) {
    const LaneSpec& lane = lanes[li];
    check_lane(lane);
    Polyline poly = build_polyline(lane);

    for (int k = 0; k < lane.count; ++k) {
      std::seed_seq sseq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(li),
                         static_cast<std::uint64_t>(k)};
      std::mt19937_64 rng(sseq);
      std::uniform_real_distribution<double> uspeed(lane.speed_min, lane.speed_max);
      std::uniform_real_distribution<double> uint_(lane.interval_min, lane.interval_max);
      std::normal_distribution<double> jitter(0.0, lane.jitter_sigma > 0.0 ? lane.jitter_sigma : 1.0);

      double speed = lane.speed_min == lane.speed_max ? lane.speed_min : uspeed(rng);
      double dt = lane.interval_min == lane.interval_max ? lane.interval_min : uint_(rng);
      auto samples = static_cast<std::size_t>(std::floor(poly.total() / (speed * dt))) + 1;
      if (samples < 2)
        throw Error("synth: lane too short for chosen speed/interval (single sample)");

      Trajectory traj;
      traj.id = "lane" + std::to_string(li + 1) + "_" + std::to_string(k + 1);
      traj.points.reserve(samples);
      for (std::size_t s = 0; s < samples; ++s) {
        double t = static_cast<double>(s) * dt;
        auto [pos, normal] = poly.at(speed * t);
        double off = 0.0;
        if (lane.jitter_sigma > 0.0) {
          off = jitter(rng);
          off = std::clamp(off, -4.0 * lane.jitter_sigma, 4.0 * lane.jitter_sigma);
        }
        traj.points.push_back({pos.y + off * normal.y, pos.x + off * normal.x, t});
      }
      res.trajectories.push_back(std::move(traj));
      res.labels.push_back(static_cast<int>(li + 1));
    }
  }
  return res;
}

}  // namespace trajsim
