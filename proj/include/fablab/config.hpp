// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fablab/lab.hpp"

namespace fablab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration for the dominance curve. FIC entries take their
/// dc from the replication level, so "dc" may be omitted for them.
struct DominanceConfig {
  GenConfig dataset;
  std::vector<int> replications;
  std::vector<PriorSpec> priors;
  int k_max = 0;
  double var_floor_scale = 0.0;
  std::string out;  // optional default output path
};

/// Experiment configuration for the d-sweep. The fit block carries the
/// shared FabConfig; d and seed come from the grid and seed list per cell.
struct SelectionConfig {
  GenConfig dataset;
  std::vector<double> d_grid;
  std::vector<std::uint64_t> seeds;
  FabConfig fit;
  std::string out;
};

/// Both loaders validate the schema before any computation: required keys,
/// types, value ranges, and rejection of unknown keys by name.
DominanceConfig load_dominance_config(const std::filesystem::path& path);
SelectionConfig load_selection_config(const std::filesystem::path& path);

}  // namespace fablab
