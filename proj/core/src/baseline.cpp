#include "trajsim/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "trajsim/error.hpp"

namespace trajsim {

namespace {

inline double ground(const Point2& p, const Point2& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

}  // namespace

PointSeq to_point_seq(const Trajectory& traj) {
  PointSeq out;
  out.reserve(traj.points.size());
  for (const auto& p : traj.points) out.push_back({p.lng, p.lat});
  return out;
}

double dtw(const PointSeq& a, const PointSeq& b) {
  if (a.empty() || b.empty()) throw Error("dtw: empty sequence");
  const std::size_t n = a.size(), m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;  // virtual start so that D[1][1] = d(a0,b0)
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      double d = ground(a[i - 1], b[j - 1]);
      cur[j] = d + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double frechet_discrete(const PointSeq& a, const PointSeq& b) {
  if (a.empty() || b.empty()) throw Error("frechet: empty sequence");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double d = ground(a[i], b[j]);
      if (i == 0 && j == 0) {
        cur[j] = d;
      } else if (i == 0) {
        cur[j] = std::max(cur[j - 1], d);
      } else if (j == 0) {
        cur[j] = std::max(prev[j], d);
      } else {
        cur[j] = std::max(std::min({prev[j], cur[j - 1], prev[j - 1]}), d);
      }
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

}  // namespace trajsim
