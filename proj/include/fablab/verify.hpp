// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fablab/priors.hpp"

namespace fablab {

struct IdentityReport {
  std::string identity;
  std::uint64_t instances = 0;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Exhaustive prior identity checks over n <= n_max, k <= k_max:
///   - class-form reconstruction: the brute-force sum of sequence
///     probabilities over a fixed occupancy vector equals the class form;
///   - the dc=2 score minus the class form equals log k! for every
///     assignment;
///   - the gfic/fic endpoint identity on seeded random count vectors;
///   - strict sharpening of the fic score in dc;
///   - finiteness of every score produced along the way.
/// Requires n_max <= 8; throws BudgetError beyond.
std::vector<IdentityReport> run_prior_identity_suite(int n_max, int k_max);

struct NormalizerRow {
  int n = 0;
  int k = 0;
  double compositions = 0.0;
  double partitions = 0.0;
};

/// Side-by-side fixed-K normalizers over both candidate supports,
/// n in [1, n_max], k in [1, k_max].
std::vector<NormalizerRow> normalizer_table(int n_max, int k_max);

struct SequenceMassRow {
  int n = 0;
  int k = 0;
  double total_mass = 0.0;  // sum of sequence probabilities over {1..k}^n
};

/// Brute-force total sequence-probability mass per (n, k). Reported, never
/// asserted: the sequence form is not claimed to normalize over {1..k}^n
/// for fixed k. Requires n_max <= 8.
std::vector<SequenceMassRow> sequence_mass_table(int n_max, int k_max);

}  // namespace fablab
