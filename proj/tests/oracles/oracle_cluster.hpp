#pragma once

#include <vector>

#include "trajsim/clustering.hpp"
#include "trajsim/similarity.hpp"

namespace oracle {

struct NaiveMerge {
  int a = 0;
  int b = 0;
  double height = 0.0;
  std::vector<std::size_t> members;  // leaves of the merged cluster
};

/// Agglomeration that rescans every cluster pair each step and recomputes
/// cluster distances from the original matrix by their definitions (mean,
/// max or min over cross pairs). O(n^3) and table-free.
std::vector<NaiveMerge> hca_rescan(const trajsim::DistanceMatrix& matrix,
                                   trajsim::Linkage linkage);

/// Leaf partition after the first n-z merges of the rescan oracle.
std::vector<std::vector<std::size_t>> cut_rescan(const trajsim::DistanceMatrix& matrix,
                                                 trajsim::Linkage linkage, int z);

}  // namespace oracle
