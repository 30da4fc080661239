#include "trajsim/trajectory_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "trajsim/error.hpp"
#include "trajsim/format.hpp"

namespace trajsim {

namespace {

// Stable sort keeps file order among equal timestamps, which makes the
// keep-first dedup policy independent of how ties were ordered on disk.
void sort_and_dedup(Trajectory& traj, std::uint64_t& dup_count) {
  std::stable_sort(traj.points.begin(), traj.points.end(),
                   [](const TimestampedPoint& a, const TimestampedPoint& b) { return a.t < b.t; });
  auto last = std::unique(traj.points.begin(), traj.points.end(),
                          [](const TimestampedPoint& a, const TimestampedPoint& b) { return a.t == b.t; });
  dup_count += static_cast<std::uint64_t>(traj.points.end() - last);
  traj.points.erase(last, traj.points.end());
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory CSV: " + path);
  return ingest_csv(in, opts);
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& opts) {
  if (!opts.bbox.valid()) throw Error("ingest: invalid bounding box");
  IngestResult res;
  // std::map keeps ids in lexicographic order: output is independent of row order.
  std::map<std::string, Trajectory> by_id;

  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;  // header row `id,t,lat,lng`
    }
    ++res.rows_total;
    auto fields = split_csv_line(sv);
    if (fields.size() < 4) {
      ++res.rows_malformed;
      continue;
    }
    std::string_view id = trim(fields[0]);
    auto t = parse_double(fields[1]);
    auto lat = parse_double(fields[2]);
    auto lng = parse_double(fields[3]);
    if (id.empty() || !t || !lat || !lng) {
      ++res.rows_malformed;
      continue;
    }
    TimestampedPoint p{*lat, *lng, *t};
    if (!p.valid()) {
      ++res.rows_malformed;
      continue;
    }
    if (!opts.bbox.contains(p)) {
      ++res.rows_outside_bbox;
      continue;
    }
    auto& traj = by_id[std::string(id)];
    if (traj.id.empty()) traj.id = std::string(id);
    traj.points.push_back(p);
  }

  std::size_t min_points = std::max<std::size_t>(opts.min_points, 2);
  for (auto& [id, traj] : by_id) {
    sort_and_dedup(traj, res.rows_duplicate_t);
    if (traj.points.size() < min_points) {
      ++res.ids_below_min;
      continue;
    }
    res.trajectories.push_back(std::move(traj));
  }
  if (res.trajectories.empty()) throw Error("ingest: no trajectory survived filtering");
  return res;
}

std::vector<Trajectory> split_on_gap(const Trajectory& traj, double max_gap) {
  if (!(max_gap > 0.0)) throw Error("split_on_gap: max_gap must be > 0");
  std::vector<std::vector<TimestampedPoint>> segments;
  std::vector<TimestampedPoint> current;
  for (const auto& p : traj.points) {
    if (!current.empty() && p.t - current.back().t > max_gap) {
      segments.push_back(std::move(current));
      current.clear();
    }
    current.push_back(p);
  }
  if (!current.empty()) segments.push_back(std::move(current));

  bool suffix = segments.size() > 1;
  std::vector<Trajectory> out;
  std::size_t k = 0;
  for (auto& seg : segments) {
    ++k;
    if (seg.size() < 2) continue;
    Trajectory t;
    t.id = suffix ? traj.id + "#" + std::to_string(k) : traj.id;
    t.points = std::move(seg);
    out.push_back(std::move(t));
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<Trajectory>& trajs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trajectory CSV: " + path);
  write_trajectory_csv(out, trajs);
}

void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& trajs) {
  out << "id,t,lat,lng\n";
  for (const auto& traj : trajs) {
    for (const auto& p : traj.points) {
      out << traj.id << ',' << fmt_exact(p.t) << ',' << fmt_exact(p.lat) << ','
          << fmt_exact(p.lng) << '\n';
    }
  }
}

}  // namespace trajsim
