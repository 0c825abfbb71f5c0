// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>
#include <vector>

#include "fablab/gmm.hpp"
#include "fablab/priors.hpp"

namespace fablab {

/// Synthetic equal-weight Gaussian clusters with means on a line along the
/// first feature axis, adjacent means `separation` standard deviations apart.
struct GenConfig {
  std::uint64_t seed = 0;
  int k_true = 1;
  int n = 1;
  int dims = 1;
  double separation = 1.0;
  double variance = 1.0;
};

struct GeneratedData {
  Matrix x;
  Assignment labels;  // ground truth, 1-based
};

GeneratedData generate_gmm_data(const GenConfig& cfg);

/// Sum over blocks of the block's diagonal-Gaussian log likelihood at its
/// own floored MLE. No mixing-weight term; the likelihood is conditional on
/// the partition.
double plugin_log_lik(const Matrix& x, const Partition& b,
                      const Vector& var_floor);

/// Prior score of a partition: CRP uses the class form with
/// k_slots = block count, FIC/GFIC penalize the block sizes, Uniform is 0.
double partition_log_prior(const PriorSpec& spec, const Partition& b);

struct PosteriorEntry {
  Partition partition;
  double log_score = 0.0;  // unnormalized
  double probability = 0.0;
};

/// How partitions are scored against the data; only the blockwise plug-in
/// MLE likelihood exists.
enum class LikelihoodKind { PluginMle };

/// Exhaustive posterior over set partitions of the rows of x with at most
/// k_max blocks, using the plug-in likelihood. Requires N <= 10.
struct PosteriorTable {
  std::vector<PosteriorEntry> entries;
  PriorSpec prior;
  LikelihoodKind likelihood_kind = LikelihoodKind::PluginMle;
  double log_normalizer = 0.0;

  const PosteriorEntry& map_entry() const;
};

PosteriorTable posterior_over_partitions(const Matrix& x, const PriorSpec& spec,
                                         int k_max, double var_floor_scale);

/// Half the L1 distance between two tables over the identical support.
double total_variation(const PosteriorTable& a, const PosteriorTable& b);

/// Each feature column repeated r times; per-point structure is unchanged
/// while every log-likelihood scales by r.
Matrix replicate_columns(const Matrix& x, int r);

struct DominanceRow {
  int r = 0;
  std::string prior_kind;
  std::string prior_param;  // effective value, "" when the prior has none
  double tv_distance = 0.0;
  int map_blocks = 0;
  std::string map_partition;
};

/// For each replication r and prior: the total-variation distance between
/// that prior's posterior and the likelihood-only posterior on the
/// r-fold-replicated data, plus the MAP partition. FIC is rescored with
/// dc = 2 * D * r at every r; all other priors are held fixed.
std::vector<DominanceRow> dominance_curve(const Matrix& x_base,
                                          const std::vector<int>& replications,
                                          const std::vector<PriorSpec>& specs,
                                          int k_max, double var_floor_scale);

struct SelectionRow {
  double d = 0.0;
  std::uint64_t seed = 0;
  int selected_k = 0;
  double objective = 0.0;
  int iterations = 0;
  double ari = 0.0;
  std::string status;  // "ok" or an error marker
};

/// Grid of (d, seed) cells: generate data with the cell seed, fit with the
/// cell d and seed, report the survivor count, final objective and adjusted
/// Rand index against the generating labels. Cell failures become rows with
/// an error status; the sweep continues. Output order is the input order.
std::vector<SelectionRow> selection_sweep(const GenConfig& gen,
                                          const std::vector<double>& d_grid,
                                          const std::vector<std::uint64_t>& seeds,
                                          const FabConfig& base);

/// 1-based argmax labels per row.
std::vector<int> hard_labels(const Matrix& q);

/// Adjusted Rand index; label-permutation invariant, 1 for identical
/// groupings. Defined as 1 when both partitions are trivial.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace fablab
