#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajsim/geo.hpp"

namespace trajsim {

/// Discretization of a water area. The latitude axis has W cells and the
/// longitude axis H cells; images are zero-padded to pad_w x pad_h, the
/// smallest multiples of 16 covering W and H, so that four 2x2 poolings
/// divide evenly.
struct GridSpec {
  BoundingBox bbox;
  double delta = 0.0;  // spatial interval in degrees; 0 when dims were given directly
  int w = 0;           // latitude-axis cell count (W)
  int h = 0;           // longitude-axis cell count (H)
  int pad_w = 0;
  int pad_h = 0;

  /// W = ceil(lat extent / delta), H analogous; both must come out >= 2.
  static GridSpec from_delta(const BoundingBox& bbox, double delta);
  /// Explicit cell counts (used by tests and fixed-size experiments).
  static GridSpec from_dims(const BoundingBox& bbox, int w, int h);

  std::size_t padded_size() const { return static_cast<std::size_t>(pad_w) * pad_h; }
};

bool operator==(const GridSpec& a, const GridSpec& b);

/// Per-cell visit counts J over the unpadded W x H grid.
struct CountImage {
  GridSpec grid;
  std::vector<std::uint32_t> counts;  // w-major: counts[w*H + h]

  std::uint32_t at(int w, int h) const { return counts[static_cast<std::size_t>(w) * grid.h + h]; }
};

/// Binary image X on the padded canvas; nonzero pixels only in the W x H region.
struct TrajectoryImage {
  GridSpec grid;
  std::vector<std::uint8_t> pixels;  // pad_w x pad_h, w-major, values {0,1}

  std::uint8_t at(int w, int h) const { return pixels[static_cast<std::size_t>(w) * grid.pad_h + h]; }
};

/// Cell of a point under the ceil projection, 1-based on both axes:
/// w = ceil((lat - lat_min)/(lat_max - lat_min) * (W-1)) + 1, h analogous.
/// Throws Error("out of grid") for points outside the bbox (closed).
std::pair<int, int> project_point(const TimestampedPoint& p, const GridSpec& grid);

/// Projects every point into the grid (count image J) and thresholds:
/// pixel = 1 iff count > epsilon (strict). Throws on an empty trajectory or
/// out-of-bbox points.
std::pair<CountImage, TrajectoryImage> rasterize(const Trajectory& traj, const GridSpec& grid,
                                                 std::uint32_t epsilon = 3);

/// Binary PGM (P5, maxval 255) of the padded image; 1 maps to 255.
void write_pgm(const std::string& path, const TrajectoryImage& img);
/// Real-valued image (e.g. a reconstruction) clamped to [0,1] then scaled.
void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols);

}  // namespace trajsim
