#include "trajsim/raster.hpp"

#include <cmath>
#include <fstream>

#include "trajsim/error.hpp"

namespace trajsim {

namespace {

int pad16(int n) { return ((n + 15) / 16) * 16; }

}  // namespace

GridSpec GridSpec::from_delta(const BoundingBox& bbox, double delta) {
  if (!bbox.valid()) throw Error("grid: invalid bounding box");
  if (!(delta > 0.0)) throw Error("grid: delta must be > 0");
  // The (1 - 1e-12) factor keeps an extent that is an exact multiple of delta
  // from spilling into an extra cell through quotient roundoff.
  int w = static_cast<int>(std::ceil((bbox.lat_max - bbox.lat_min) / delta * (1.0 - 1e-12)));
  int h = static_cast<int>(std::ceil((bbox.lng_max - bbox.lng_min) / delta * (1.0 - 1e-12)));
  if (w < 2 || h < 2) throw Error("grid: delta too coarse, need at least 2 cells per axis");
  GridSpec g = from_dims(bbox, w, h);
  g.delta = delta;
  return g;
}

GridSpec GridSpec::from_dims(const BoundingBox& bbox, int w, int h) {
  if (!bbox.valid()) throw Error("grid: invalid bounding box");
  if (w < 2 || h < 2) throw Error("grid: need at least 2 cells per axis");
  GridSpec g;
  g.bbox = bbox;
  g.w = w;
  g.h = h;
  g.pad_w = pad16(w);
  g.pad_h = pad16(h);
  return g;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.bbox == b.bbox && a.w == b.w && a.h == b.h && a.pad_w == b.pad_w && a.pad_h == b.pad_h;
}

std::pair<int, int> project_point(const TimestampedPoint& p, const GridSpec& grid) {
  const auto& bb = grid.bbox;
  if (!bb.contains(p)) throw Error("project_point: out of grid");
  double fw = (p.lat - bb.lat_min) / (bb.lat_max - bb.lat_min);
  double fh = (p.lng - bb.lng_min) / (bb.lng_max - bb.lng_min);
  int w = static_cast<int>(std::ceil(fw * (grid.w - 1))) + 1;
  int h = static_cast<int>(std::ceil(fh * (grid.h - 1))) + 1;
  return {w, h};
}

std::pair<CountImage, TrajectoryImage> rasterize(const Trajectory& traj, const GridSpec& grid,
                                                 std::uint32_t epsilon) {
  if (traj.points.empty()) throw Error("rasterize: empty trajectory");

  CountImage j;
  j.grid = grid;
  j.counts.assign(static_cast<std::size_t>(grid.w) * grid.h, 0);
  for (const auto& p : traj.points) {
    auto [w, h] = project_point(p, grid);
    ++j.counts[static_cast<std::size_t>(w - 1) * grid.h + (h - 1)];
  }

  TrajectoryImage x;
  x.grid = grid;
  x.pixels.assign(grid.padded_size(), 0);
  for (int w = 0; w < grid.w; ++w)
    for (int h = 0; h < grid.h; ++h)
      if (j.counts[static_cast<std::size_t>(w) * grid.h + h] > epsilon)
        x.pixels[static_cast<std::size_t>(w) * grid.pad_h + h] = 1;
  return {std::move(j), std::move(x)};
}

void write_pgm(const std::string& path, const TrajectoryImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write PGM: " + path);
  out << "P5\n" << img.grid.pad_h << " " << img.grid.pad_w << "\n255\n";
  for (auto v : img.pixels) out.put(v ? static_cast<char>(255) : 0);
}

void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols) {
  if (values.size() != static_cast<std::size_t>(rows) * cols)
    throw Error("write_pgm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write PGM: " + path);
  out << "P5\n" << cols << " " << rows << "\n255\n";
  for (double v : values) {
    double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    out.put(static_cast<char>(std::lround(c * 255.0)));
  }
}

}  // namespace trajsim
