// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fablab/lab.hpp"

namespace fablab {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric CSV, one observation per row, comma separated, decimal-point
/// floats. With header=true the first line is skipped. Errors name the
/// offending row and column.
Matrix load_csv_matrix(const std::filesystem::path& path, bool header);

/// Writes to a sibling temp file and renames, so failures never leave a
/// partial file at `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

/// Shortest round-trip decimal rendering.
std::string format_double(double v);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(const std::string& raw);

/// {k, weights, means, variances, d, seed, iterations, converged}
std::string model_json(const GmmModel& model, double d, std::uint64_t seed,
                       int iterations, bool converged);

/// r,prior_kind,prior_param,tv_distance,map_blocks,map_partition
std::string dominance_csv(const std::vector<DominanceRow>& rows);

/// d,seed,selected_k,objective,iterations,ari,status
std::string selection_csv(const std::vector<SelectionRow>& rows);

}  // namespace fablab
