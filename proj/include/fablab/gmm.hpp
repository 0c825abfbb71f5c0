// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fablab/partition.hpp"

namespace fablab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Diagonal-covariance Gaussian mixture; means and variances are k x D.
struct GmmModel {
  Vector weights;
  Matrix means;
  Matrix variances;

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

/// Throws std::invalid_argument unless x is a nonempty matrix of finite
/// values (rows are observations).
void validate_dataset(const Matrix& x);

/// sum_j [ -log(2 pi var_j)/2 - (x_j - mean_j)^2 / (2 var_j) ].
double component_log_pdf(const Eigen::Ref<const Vector>& x,
                         const Eigen::Ref<const Vector>& mean,
                         const Eigen::Ref<const Vector>& variance);

/// N x k matrix of per-component log densities.
Matrix log_pdf_matrix(const Matrix& x, const GmmModel& model);

/// Per-feature variance floor: scale times the biased per-feature data
/// variance, with `scale` itself substituted for features of zero spread.
Vector variance_floor(const Matrix& x, double scale);

/// Weight n_k/N, sample mean, biased sample variance floored elementwise;
/// empty slots are dropped so the result has one component per nonempty
/// label.
GmmModel mle_fit_given_assignment(const Matrix& x, const Assignment& z,
                                  const Vector& var_floor);

struct EStep {
  Matrix responsibilities;  // N x k, rows on the simplex
  Vector soft_counts;       // column sums
};

/// q_ik proportional to w_k * pdf_ik * exp(-d / prev_soft_counts_k), rows
/// normalized in log space. d = 0 skips the shrinkage factor entirely and
/// reduces to the plain EM responsibilities.
EStep fab_e_step(const Matrix& x, const GmmModel& model, double d,
                 const Vector& prev_soft_counts);

/// Weighted maximum-likelihood update. A zero column yields weight 0 with
/// floored variance, flagging the component for pruning.
GmmModel fab_m_step(const Matrix& x, const Matrix& q, const Vector& var_floor);

/// sum_ik q_ik [log w_k + log pdf_ik] - d * sum_{soft_k > 0} log soft_k
/// + row entropies of q.
double fab_objective(const Matrix& x, const Matrix& q, const GmmModel& model,
                     double d);

enum class InitMethod { RandomResponsibilities, KMeansStyle };

struct FabConfig {
  int k_init = 1;
  double d = 0.0;
  int max_iters = 500;
  double rel_tol = 1e-6;
  double var_floor_scale = 1e-6;  // times per-feature data variance
  double prune_threshold = -1.0;  // negative means max(d, 1)
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::RandomResponsibilities;

  double effective_prune_threshold() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  int live_components = 0;
  std::vector<int> pruned;  // 1-based initial component ids removed here
};

struct FitTrace {
  std::vector<IterationRecord> records;
  int iterations = 0;
  bool converged = false;
};

struct FabResult {
  GmmModel model;
  FitTrace trace;
  Matrix responsibilities;        // final, N x surviving components
  std::vector<int> component_ids; // surviving 1-based initial ids
};

/// Seeded starting responsibilities: flat-Dirichlet rows, or a hard
/// nearest-center assignment from k_init seeded distinct data rows.
Matrix initial_responsibilities(const Matrix& x, const FabConfig& cfg);

/// Alternates fab_e_step / fab_m_step from the given starting
/// responsibilities. After each E-step, components whose soft count falls
/// below the prune threshold are removed and the rows renormalized (the
/// largest component is always retained). Stops when the relative objective
/// change in a prune-free iteration drops below rel_tol, or at max_iters.
/// Deterministic given cfg.seed.
FabResult fab_fit_from(const Matrix& x, const FabConfig& cfg, Matrix q0);

FabResult fab_fit(const Matrix& x, const FabConfig& cfg);

}  // namespace fablab
