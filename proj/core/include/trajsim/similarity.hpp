#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajsim/cae.hpp"
#include "trajsim/geo.hpp"

namespace trajsim {

enum class Metric { cae, dtw, frechet };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric m);

/// Symmetric pairwise distances with zero diagonal, dense row-major.
struct DistanceMatrix {
  Metric metric = Metric::cae;
  std::vector<std::string> ids;
  std::vector<double> values;  // n*n

  std::size_t n() const { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * n() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n() + j]; }

  /// Symmetry (1e-12), zero diagonal, non-negativity.
  void validate() const;
};

/// Euclidean distance between embedding vectors of equal dimension.
double euclid_embed(const Embedding& a, const Embedding& b);
double euclid_embed(std::span<const double> a, std::span<const double> b);

struct BuildMatrixOptions {
  Metric metric = Metric::dtw;
  std::uint32_t epsilon = 3;  // rasterization threshold for the cae metric
  int threads = 1;
};

/// Builds the full matrix; upper triangle computed, mirrored, zero diagonal.
/// For the cae metric every trajectory is rasterized and encoded exactly
/// once (n encodes, n^2 cheap vector distances). `model` is required for cae
/// and must cover all trajectories.
DistanceMatrix build_matrix(const std::vector<Trajectory>& trajs, const BuildMatrixOptions& opts,
                            const CaeModel* model = nullptr);

/// Matrix over precomputed embeddings (shared by sweep/evaluation paths).
DistanceMatrix embedding_matrix(const std::vector<Embedding>& embs, int threads = 1);

/// CSV: header row of ids, then n rows of n distances at 12 significant digits.
void write_matrix_csv(const std::string& path, const DistanceMatrix& m);
DistanceMatrix read_matrix_csv(const std::string& path);

}  // namespace trajsim
