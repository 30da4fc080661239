#pragma once

#include <cstdint>
#include <string>

#include "trajsim/cae.hpp"
#include "trajsim/geo.hpp"

namespace trajsim {

/// Whole-pipeline configuration. Serializes to a line-oriented `key = value`
/// text file; parse(serialize(c)) == c exactly (numbers are written with
/// round-trip precision).
struct PipelineConfig {
  BoundingBox bbox{0.0, 0.6, 0.0, 0.45};
  double delta = 0.01;       // grid spatial interval, degrees
  std::uint32_t epsilon = 3; // rasterization count threshold
  double interval = 5.0;     // resample interval, seconds
  double max_gap = 600.0;    // ingest gap split, seconds; 0 disables
  int min_points = 2;

  int embedding_dim = 3;
  double lambda1 = 0.15;
  double lambda2 = 0.85;
  int batch_size = 200;
  int epochs = 3000;
  double lr = 0.001;
  std::string optimizer = "adam";

  std::string linkage = "average";
  std::string metric = "cae";
  int z = 3;
  int z_min = 2;
  int z_max = 25;

  std::uint64_t seed = 0;
  int threads = 0;  // 0 = machine parallelism
  std::string input;
  std::string output;

  CaeConfig cae_config() const;

  std::string serialize() const;
  static PipelineConfig parse(const std::string& text);
  static PipelineConfig load(const std::string& path);
  void save(const std::string& path) const;
};

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace trajsim
