#include "oracle_cluster.hpp"

#include <algorithm>
#include <limits>

namespace oracle {

using trajsim::DistanceMatrix;
using trajsim::Linkage;

namespace {

struct Cluster {
  int id;
  std::vector<std::size_t> members;
};

double cluster_dist(const Cluster& a, const Cluster& b, const DistanceMatrix& m, Linkage linkage) {
  double acc = linkage == Linkage::single ? std::numeric_limits<double>::infinity()
               : linkage == Linkage::complete ? -std::numeric_limits<double>::infinity()
                                              : 0.0;
  for (std::size_t i : a.members)
    for (std::size_t j : b.members) {
      double d = m.at(i, j);
      switch (linkage) {
        case Linkage::average: acc += d; break;
        case Linkage::complete: acc = std::max(acc, d); break;
        case Linkage::single: acc = std::min(acc, d); break;
      }
    }
  if (linkage == Linkage::average)
    acc /= static_cast<double>(a.members.size() * b.members.size());
  return acc;
}

}  // namespace

std::vector<NaiveMerge> hca_rescan(const DistanceMatrix& matrix, Linkage linkage) {
  const std::size_t n = matrix.n();
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({static_cast<int>(i), {i}});

  std::vector<NaiveMerge> merges;
  int next_id = static_cast<int>(n);
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    int ba = 0, bb = 0;
    bool found = false;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double d = cluster_dist(clusters[i], clusters[j], matrix, linkage);
        int a = std::min(clusters[i].id, clusters[j].id);
        int b = std::max(clusters[i].id, clusters[j].id);
        if (d < best || (d == best && (!found || a < ba || (a == ba && b < bb)))) {
          best = d;
          bi = i;
          bj = j;
          ba = a;
          bb = b;
          found = true;
        }
      }
    NaiveMerge m;
    m.a = ba;
    m.b = bb;
    m.height = best;
    m.members = clusters[bi].members;
    m.members.insert(m.members.end(), clusters[bj].members.begin(), clusters[bj].members.end());
    std::sort(m.members.begin(), m.members.end());
    clusters[bi] = {next_id++, m.members};
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    merges.push_back(std::move(m));
  }
  return merges;
}

std::vector<std::vector<std::size_t>> cut_rescan(const DistanceMatrix& matrix, Linkage linkage,
                                                 int z) {
  const std::size_t n = matrix.n();
  auto merges = hca_rescan(matrix, linkage);
  // replay: start from singletons, apply first n-z merges
  std::vector<std::vector<std::size_t>> parts;
  for (std::size_t i = 0; i < n; ++i) parts.push_back({i});
  for (std::size_t s = 0; s < n - static_cast<std::size_t>(z); ++s) {
    const auto& target = merges[s].members;
    std::vector<std::vector<std::size_t>> next;
    std::vector<std::size_t> merged;
    for (auto& p : parts) {
      bool inside = std::includes(target.begin(), target.end(), p.begin(), p.end());
      if (inside)
        merged.insert(merged.end(), p.begin(), p.end());
      else
        next.push_back(std::move(p));
    }
    std::sort(merged.begin(), merged.end());
    next.push_back(std::move(merged));
    parts = std::move(next);
  }
  for (auto& p : parts) std::sort(p.begin(), p.end());
  std::sort(parts.begin(), parts.end());
  return parts;
}

}  // namespace oracle
