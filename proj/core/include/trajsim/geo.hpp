#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace trajsim {

/// One AIS position report: WGS-84 degrees plus a Unix timestamp in seconds.
struct TimestampedPoint {
  double lat = 0.0;
  double lng = 0.0;
  double t = 0.0;

  bool valid() const {
    return std::isfinite(lat) && std::isfinite(lng) && std::isfinite(t) &&
           lat >= -90.0 && lat <= 90.0 && lng >= -180.0 && lng <= 180.0;
  }
};

inline bool operator==(const TimestampedPoint& a, const TimestampedPoint& b) {
  return a.lat == b.lat && a.lng == b.lng && a.t == b.t;
}

/// Ordered position sequence for one vessel (id plays the MMSI role).
/// Timestamps are strictly increasing after ingestion.
struct Trajectory {
  std::string id;
  std::vector<TimestampedPoint> points;

  std::size_t size() const { return points.size(); }
};

inline bool operator==(const Trajectory& a, const Trajectory& b) {
  return a.id == b.id && a.points == b.points;
}

/// Rectangular water area in degrees, lower-left inclusive to upper-right inclusive.
struct BoundingBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lng_min = 0.0;
  double lng_max = 0.0;

  bool valid() const { return lat_min < lat_max && lng_min < lng_max; }
  bool contains(double lat, double lng) const {
    return lat >= lat_min && lat <= lat_max && lng >= lng_min && lng <= lng_max;
  }
  bool contains(const TimestampedPoint& p) const { return contains(p.lat, p.lng); }
};

inline bool operator==(const BoundingBox& a, const BoundingBox& b) {
  return a.lat_min == b.lat_min && a.lat_max == b.lat_max &&
         a.lng_min == b.lng_min && a.lng_max == b.lng_max;
}

}  // namespace trajsim
