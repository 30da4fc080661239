#pragma once

#include <string>
#include <vector>

#include "trajsim/cae.hpp"
#include "trajsim/similarity.hpp"

namespace trajsim {

enum class Linkage { average, complete, single };

Linkage linkage_from_string(const std::string& name);
std::string to_string(Linkage l);

/// Agglomerative merge sequence. Clusters are numbered scipy-style: leaves
/// 0..n-1, the i-th merge creates cluster n+i.
struct Dendrogram {
  struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
  };
  std::size_t n = 0;
  std::vector<Merge> merges;  // n-1 entries, non-decreasing heights
};

/// Flat clustering: labels in [1, Z], assigned in first-appearance order.
struct ClusterAssignment {
  std::vector<int> labels;
  int z = 0;
};

/// Hierarchical agglomeration by iterative nearest-pair merging with
/// Lance-Williams distance updates. Ties pick the lexicographically lowest
/// (i, j) cluster-id pair. The matrix must satisfy its invariants.
Dendrogram hca(const DistanceMatrix& matrix, Linkage linkage);

/// Undoes the last Z-1 merges and labels the remaining components.
ClusterAssignment cut(const Dendrogram& dendro, int z);

/// Member minimizing the summed distance to the other members (ties: lowest
/// index). `members` holds indices into the matrix.
std::size_t exemplar(const std::vector<std::size_t>& members, const DistanceMatrix& matrix);

struct BcWcAc {
  double bc = 0.0;
  double wc = 0.0;
  double ac = 0.0;  // wc / (bc + wc), 1 when both vanish
};

/// Between-like / within-like criteria over embedding space, using cluster
/// exemplars as mean stand-ins.
BcWcAc bc_wc_ac(const ClusterAssignment& assignment, const std::vector<Embedding>& embeddings);

/// Fraction of point pairs on which the two assignments agree.
double rand_index(const ClusterAssignment& a, const ClusterAssignment& b);

struct AcSweepRow {
  int z = 0;
  double bc = 0.0, wc = 0.0, ac = 0.0;
};

/// AC as a function of Z in [z_min, z_max] for one dendrogram.
std::vector<AcSweepRow> sweep_ac(const Dendrogram& dendro, const std::vector<Embedding>& embeddings,
                                 int z_min, int z_max);

// Artifact writers/readers.
void write_assignment_csv(const std::string& path, const std::vector<std::string>& ids,
                          const ClusterAssignment& assignment);
ClusterAssignment read_assignment_csv(const std::string& path, std::vector<std::string>* ids = nullptr);
void write_ac_sweep_csv(const std::string& path, const std::vector<AcSweepRow>& rows);
/// GeoJSON FeatureCollection of LineStrings with a `cluster` property.
void write_geojson(const std::string& path, const std::vector<Trajectory>& trajs,
                   const ClusterAssignment& assignment);

/// Labels CSV (`id,label`); used for synthetic ground truth.
void write_labels_csv(const std::string& path, const std::vector<std::string>& ids,
                      const std::vector<int>& labels);
std::vector<std::pair<std::string, int>> read_labels_csv(const std::string& path);

}  // namespace trajsim
