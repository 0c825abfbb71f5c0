// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>

#include "fablab/partition.hpp"

namespace fablab {

enum class PriorKind { Crp, Fic, Gfic, Uniform };

/// Tagged choice of prior over latent cluster assignments. All scores are
/// log-space; `normalized` records whether the score is a normalized
/// probability over its support (true only for the CRP forms and Uniform
/// over an explicit finite support).
struct PriorSpec {
  PriorKind kind = PriorKind::Uniform;
  double dc = 0.0;  // parameter dimensionality, FIC only
  double d = 0.0;   // exponent, GFIC only
  bool normalized = false;

  static PriorSpec crp();
  static PriorSpec fic(double dc);
  static PriorSpec gfic(double d);
  static PriorSpec uniform();

  std::string name() const;          // "crp" | "fic" | "gfic" | "uniform"
  std::string param_string() const;  // dc or d rendered, "" when none
};

/// log(n!) via lgamma; exact integer oracles live in the tests.
double log_factorial(int n);

/// log[ prod_{n_k>0} (n_k - 1)! / (N! K!) ] with K = z.k_slots. Empty slots
/// contribute factor 1. Normalized over sequences jointly with K in the
/// source process, not over {1..K}^N for fixed K.
double crp_sequence_log_prob(const Assignment& z);

/// log[ 1 / (k_slots! * prod n_k) ] over the nonempty block sizes of b.
/// Rejects k_slots < block count.
double crp_class_log_prob(const Partition& b, int k_slots);

/// Fixed-K normalizer summed over ordered count tuples (n_1..n_k), n_j >= 0,
/// sum n_j = n, of 1 / prod_{n_j>0} n_j. Linear-space value; small enough to
/// be exact at desk scale.
double crp_fixed_k_normalizer_compositions(int n, int k);
double crp_fixed_k_normalizer_compositions(int n, int k, std::uint64_t budget);
double crp_fixed_k_log_normalizer_compositions(int n, int k);

/// Same sum restricted to set partitions with at most k blocks. The two
/// supports disagree (n=2, k=2 gives 2 vs 3/2); both are reported, never
/// reconciled.
double crp_fixed_k_normalizer_partitions(int n, int k);
double crp_fixed_k_normalizer_partitions(int n, int k, std::uint64_t budget);
double crp_fixed_k_log_normalizer_partitions(int n, int k);

/// -(dc/2) * sum_{n_k>0} log n_k, the log of the unnormalized
/// prod n_k^{-dc/2}. Requires dc > 0.
double fic_log_score(const CountVector& counts, double dc);

/// -d * sum_{n_k>0} log n_k. Requires d >= 0; d = dc/2 recovers
/// fic_log_score bit for bit and d = 0 scores everything 0.
double gfic_log_score(const CountVector& counts, double d);

/// True when d lies strictly inside (1, dc/2). Callers warn, never fail,
/// when stepping outside; both endpoints are deliberate experiment settings.
bool gfic_d_in_nominal_range(double d, double dc);

/// Dispatch on spec.kind; CRP uses the sequence form, FIC/GFIC score the
/// occupancy counts, Uniform scores 0.
double log_prior(const PriorSpec& spec, const Assignment& z);

}  // namespace fablab
