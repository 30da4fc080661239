#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajsim/geo.hpp"

namespace trajsim {

struct IngestOptions {
  BoundingBox bbox;
  std::size_t min_points = 2;
};

struct IngestResult {
  std::vector<Trajectory> trajectories;
  std::uint64_t rows_total = 0;
  std::uint64_t rows_malformed = 0;   // skipped with a counted warning
  std::uint64_t rows_outside_bbox = 0;
  std::uint64_t rows_duplicate_t = 0; // per-id duplicate timestamps, first kept
  std::uint64_t ids_below_min = 0;    // ids dropped for having < min_points
};

/// Reads an AIS CSV (`id,t,lat,lng` header, extra columns ignored) and groups
/// rows into one trajectory per id, sorted by time. Rows outside the bbox are
/// dropped; duplicate timestamps keep the first occurrence in file order;
/// ids with fewer than min_points surviving rows are discarded.
///
/// Throws Error if the file cannot be read or no trajectory survives.
IngestResult ingest_csv(const std::string& path, const IngestOptions& opts);

/// Same contract, reading from an already-open stream (used by tests).
IngestResult ingest_csv(std::istream& in, const IngestOptions& opts);

/// Splits a trajectory wherever the time gap between consecutive points
/// exceeds max_gap seconds. Segments keep the parent id with a "#k" suffix
/// when more than one segment results; segments shorter than 2 points are
/// dropped. max_gap must be > 0.
std::vector<Trajectory> split_on_gap(const Trajectory& traj, double max_gap);

/// Writes trajectories in the ingestion CSV format with exact (round-trip)
/// number formatting, so ingest(write(x)) == x.
void write_trajectory_csv(const std::string& path, const std::vector<Trajectory>& trajs);
void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& trajs);

}  // namespace trajsim
