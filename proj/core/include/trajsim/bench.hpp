#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trajsim/similarity.hpp"

namespace trajsim {

struct BenchOptions {
  std::vector<Metric> methods;
  int repetitions = 1;
  std::uint32_t epsilon = 3;
  int threads = 1;
};

struct BenchRow {
  std::size_t n = 0;
  Metric method = Metric::dtw;
  double mean_s = 0.0;
  double std_s = 0.0;  // population std over repetitions (0 when repetitions = 1)
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<double> ratio_dtw_cae;      // R_D/C: quotient of the mean times
  std::optional<double> ratio_frechet_cae;  // R_F/C
};

/// Times full distance-matrix construction per method. The timed region
/// starts with all trajectories memory-resident; for cae it includes
/// rasterization and encoding of every trajectory but never training or
/// model loading.
BenchReport run_bench(const std::vector<Trajectory>& trajs, const BenchOptions& opts,
                      const CaeModel* model = nullptr);

/// CSV rows `N,method,mean_s,std_s`.
void write_bench_csv(const std::string& path, const BenchReport& report);

}  // namespace trajsim
