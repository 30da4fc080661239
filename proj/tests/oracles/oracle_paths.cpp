#include "oracle_paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using trajsim::Point2;
using trajsim::PointSeq;

namespace {

double dist(const Point2& p, const Point2& q) {
  double dx = p.x - q.x, dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

void walk_sum(const PointSeq& a, const PointSeq& b, std::size_t i, std::size_t j, double acc,
              double& best) {
  acc += dist(a[i], b[j]);
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.size()) walk_sum(a, b, i + 1, j, acc, best);
  if (j + 1 < b.size()) walk_sum(a, b, i, j + 1, acc, best);
  if (i + 1 < a.size() && j + 1 < b.size()) walk_sum(a, b, i + 1, j + 1, acc, best);
}

void walk_max(const PointSeq& a, const PointSeq& b, std::size_t i, std::size_t j, double acc,
              double& best) {
  acc = std::max(acc, dist(a[i], b[j]));
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.size()) walk_max(a, b, i + 1, j, acc, best);
  if (j + 1 < b.size()) walk_max(a, b, i, j + 1, acc, best);
  if (i + 1 < a.size() && j + 1 < b.size()) walk_max(a, b, i + 1, j + 1, acc, best);
}

}  // namespace

double dtw_enumerate(const PointSeq& a, const PointSeq& b) {
  double best = std::numeric_limits<double>::infinity();
  walk_sum(a, b, 0, 0, 0.0, best);
  return best;
}

double frechet_enumerate(const PointSeq& a, const PointSeq& b) {
  double best = std::numeric_limits<double>::infinity();
  walk_max(a, b, 0, 0, 0.0, best);
  return best;
}

}  // namespace oracle
