#include "trajsim/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "trajsim/error.hpp"
#include "trajsim/format.hpp"

namespace trajsim {

Linkage linkage_from_string(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw Error("unknown linkage '" + name + "' (expected average, complete or single)");
}

std::string to_string(Linkage l) {
  switch (l) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "?";
}

Dendrogram hca(const DistanceMatrix& matrix, Linkage linkage) {
  matrix.validate();
  const std::size_t n = matrix.n();
  if (n < 2) throw Error("hca: need at least 2 items");

  // Active-slot working copy; merged clusters keep the lower slot.
  std::vector<double> d = matrix.values;
  auto dist = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };
  std::vector<int> id(n);        // current cluster id per slot (scipy numbering)
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::iota(id.begin(), id.end(), 0);

  Dendrogram out;
  out.n = n;
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    // Nearest active pair; ties resolved by lowest (id_i, id_j).
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    int best_a = 0, best_b = 0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        double v = dist(i, j);
        int a = std::min(id[i], id[j]), b = std::max(id[i], id[j]);
        bool better = v < best || (v == best && (!found || a < best_a || (a == best_a && b < best_b)));
        if (better) {
          best = v;
          bi = i;
          bj = j;
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }

    // Lance-Williams update into slot bi.
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double dik = dist(std::min(bi, k), std::max(bi, k));
      double djk = dist(std::min(bj, k), std::max(bj, k));
      double v = 0.0;
      switch (linkage) {
        case Linkage::average:
          v = (static_cast<double>(size[bi]) * dik + static_cast<double>(size[bj]) * djk) /
              static_cast<double>(size[bi] + size[bj]);
          break;
        case Linkage::complete: v = std::max(dik, djk); break;
        case Linkage::single: v = std::min(dik, djk); break;
      }
      dist(std::min(bi, k), std::max(bi, k)) = v;
    }
    out.merges.push_back({best_a, best_b, best});
    size[bi] += size[bj];
    active[bj] = false;
    id[bi] = static_cast<int>(n + step);
  }
  return out;
}

ClusterAssignment cut(const Dendrogram& dendro, int z) {
  const std::size_t n = dendro.n;
  if (z < 1 || static_cast<std::size_t>(z) > n) throw Error("cut: Z out of range");

  // Union-find over leaves; apply the first n-Z merges.
  std::vector<int> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  const std::size_t applied = n - static_cast<std::size_t>(z);
  for (std::size_t i = 0; i < applied; ++i) {
    const auto& m = dendro.merges[i];
    int root = static_cast<int>(n + i);
    parent[find(m.a)] = root;
    parent[find(m.b)] = root;
  }

  ClusterAssignment out;
  out.z = z;
  out.labels.assign(n, 0);
  std::vector<int> label_of_root(2 * n - 1, 0);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int r = find(static_cast<int>(i));
    if (label_of_root[r] == 0) label_of_root[r] = ++next;
    out.labels[i] = label_of_root[r];
  }
  return out;
}

std::size_t exemplar(const std::vector<std::size_t>& members, const DistanceMatrix& matrix) {
  if (members.empty()) throw Error("exemplar: empty member set");
  std::size_t best = members.front();
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i : members) {
    double s = 0.0;
    for (std::size_t j : members)
      if (j != i) s += matrix.at(i, j);
    if (s < best_sum) {  // strict: ties keep the lowest index seen first
      best_sum = s;
      best = i;
    }
  }
  return best;
}

namespace {

BcWcAc bc_wc_ac_impl(const ClusterAssignment& assignment, const std::vector<Embedding>& embeddings,
                     const DistanceMatrix& emb_dist) {
  const std::size_t n = embeddings.size();
  if (assignment.labels.size() != n) throw Error("bc_wc_ac: assignment/embedding size mismatch");
  if (assignment.z < 1) throw Error("bc_wc_ac: need Z >= 1");

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::size_t global_ex = exemplar(all, emb_dist);

  double bc = 0.0, wc = 0.0;
  for (int zl = 1; zl <= assignment.z; ++zl) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (assignment.labels[i] == zl) members.push_back(i);
    if (members.empty()) throw Error("bc_wc_ac: empty cluster " + std::to_string(zl));
    const std::size_t ex = exemplar(members, emb_dist);
    bc += euclid_embed(embeddings[global_ex], embeddings[ex]);
    double inner = 0.0;
    for (std::size_t i : members) inner += emb_dist.at(ex, i);
    wc += inner / static_cast<double>(members.size());
  }
  BcWcAc r;
  r.bc = bc;
  r.wc = wc;
  r.ac = (bc + wc) == 0.0 ? 1.0 : wc / (bc + wc);
  return r;
}

}  // namespace

BcWcAc bc_wc_ac(const ClusterAssignment& assignment, const std::vector<Embedding>& embeddings) {
  if (embeddings.size() < 2) throw Error("bc_wc_ac: need at least 2 embeddings");
  return bc_wc_ac_impl(assignment, embeddings, embedding_matrix(embeddings));
}

double rand_index(const ClusterAssignment& a, const ClusterAssignment& b) {
  if (a.labels.size() != b.labels.size()) throw Error("rand_index: length mismatch");
  const std::size_t n = a.labels.size();
  if (n < 2) return 1.0;
  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool same_a = a.labels[i] == a.labels[j];
      bool same_b = b.labels[i] == b.labels[j];
      agree += same_a == same_b;
      ++total;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

std::vector<AcSweepRow> sweep_ac(const Dendrogram& dendro, const std::vector<Embedding>& embeddings,
                                 int z_min, int z_max) {
  if (z_min < 1 || z_max < z_min) throw Error("sweep_ac: invalid Z range");
  if (static_cast<std::size_t>(z_max) > dendro.n) throw Error("sweep_ac: z_max exceeds item count");
  DistanceMatrix emb_dist = embedding_matrix(embeddings);
  std::vector<AcSweepRow> rows;
  rows.reserve(static_cast<std::size_t>(z_max - z_min + 1));
  for (int z = z_min; z <= z_max; ++z) {
    BcWcAc r = bc_wc_ac_impl(cut(dendro, z), embeddings, emb_dist);
    rows.push_back({z, r.bc, r.wc, r.ac});
  }
  return rows;
}

void write_assignment_csv(const std::string& path, const std::vector<std::string>& ids,
                          const ClusterAssignment& assignment) {
  if (ids.size() != assignment.labels.size()) throw Error("assignment CSV: id/label size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write assignment CSV: " + path);
  out << "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << assignment.labels[i] << "\n";
}

ClusterAssignment read_assignment_csv(const std::string& path, std::vector<std::string>* ids) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open assignment CSV: " + path);
  ClusterAssignment a;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(sv);
    if (fields.size() != 2) throw Error("assignment CSV: malformed row");
    auto v = parse_double(fields[1]);
    if (!v || *v != std::floor(*v) || *v < 1) throw Error("assignment CSV: bad cluster label");
    if (ids) ids->emplace_back(trim(fields[0]));
    a.labels.push_back(static_cast<int>(*v));
    a.z = std::max(a.z, a.labels.back());
  }
  if (a.labels.empty()) throw Error("assignment CSV: no rows");
  return a;
}

void write_ac_sweep_csv(const std::string& path, const std::vector<AcSweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write AC sweep CSV: " + path);
  out << "Z,BC,WC,AC\n";
  for (const auto& r : rows)
    out << r.z << ',' << fmt_g12(r.bc) << ',' << fmt_g12(r.wc) << ',' << fmt_g12(r.ac) << "\n";
}

void write_geojson(const std::string& path, const std::vector<Trajectory>& trajs,
                   const ClusterAssignment& assignment) {
  if (trajs.size() != assignment.labels.size()) throw Error("geojson: trajectory/label size mismatch");
  nlohmann::ordered_json root;
  root["type"] = "FeatureCollection";
  auto& features = root["features"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["properties"] = {{"id", trajs[i].id}, {"cluster", assignment.labels[i]}};
    auto& coords = f["geometry"]["coordinates"] = nlohmann::ordered_json::array();
    for (const auto& p : trajs[i].points) coords.push_back({p.lng, p.lat});
    f["geometry"]["type"] = "LineString";
    features.push_back(std::move(f));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write GeoJSON: " + path);
  out << root.dump(2) << "\n";
}

void write_labels_csv(const std::string& path, const std::vector<std::string>& ids,
                      const std::vector<int>& labels) {
  if (ids.size() != labels.size()) throw Error("labels CSV: id/label size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write labels CSV: " + path);
  out << "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << "\n";
}

std::vector<std::pair<std::string, int>> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open labels CSV: " + path);
  std::vector<std::pair<std::string, int>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(sv);
    if (fields.size() != 2) throw Error("labels CSV: malformed row");
    auto v = parse_double(fields[1]);
    if (!v) throw Error("labels CSV: bad label");
    out.emplace_back(std::string(trim(fields[0])), static_cast<int>(*v));
  }
  if (out.empty()) throw Error("labels CSV: no rows");
  return out;
}

}  // namespace trajsim
