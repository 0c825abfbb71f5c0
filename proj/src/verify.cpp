// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/verify.hpp"

#include <cmath>
#include <map>
#include <random>

namespace fablab {

namespace {

/// Occupancy vector of b's block sizes in canonical block order, zero-padded
/// to k slots. The brute-force class sum is taken over assignments with
/// exactly this occupancy; any other placement of the sizes gives the same
/// sum because the sequence probability depends only on the counts.
CountVector padded_sizes(const Partition& b, int k) {
  CountVector c = b.block_sizes();
  c.resize(static_cast<std::size_t>(k), 0);
  return c;
}

}  // namespace

std::vector<IdentityReport> run_prior_identity_suite(int n_max, int k_max) {
  if (n_max > 8) {
    throw BudgetError("prior identity suite: n_max = " + std::to_string(n_max) +
                      " exceeds the exhaustive limit of 8");
  }
  if (n_max < 1 || k_max < 1) {
    throw std::invalid_argument("prior identity suite: n_max and k_max must be >= 1");
  }

  IdentityReport reconstruction{"class-form reconstruction", 0, 0.0, 1e-10, false};
  IdentityReport equivalence{"dc=2 score vs class form = log k!", 0, 0.0, 1e-12, false};
  IdentityReport endpoint{"gfic(c, dc/2) = fic(c, dc)", 0, 0.0, 1e-15, false};
  IdentityReport sharpening{"fic strictly decreasing in dc", 0, 0.0, 0.0, false};
  IdentityReport finiteness{"all scores finite", 0, 0.0, 0.0, false};

  auto note_finite = [&](double v) {
    ++finiteness.instances;
    if (!std::isfinite(v)) finiteness.max_abs_deviation = 1.0;
  };

  for (int k = 1; k <= k_max; ++k) {
    for (int n = 1; n <= n_max; ++n) {
      // One pass over {1..k}^n, binned by occupancy vector.
      std::map<CountVector, double> fiber_sums;
      AssignmentEnumerator assignments(n, k);
      Assignment z;
      while (assignments.next(z)) {
        const CountVector counts = assignment_counts(z);
        const double seq = crp_sequence_log_prob(z);
        note_finite(seq);
        fiber_sums[counts] += std::exp(seq);

        const double fic2 = fic_log_score(counts, 2.0);
        const double cls = crp_class_log_prob(partition_of(z), k);
        note_finite(fic2);
        note_finite(cls);
        const double dev = std::abs(fic2 - cls - log_factorial(k));
        ++equivalence.instances;
        equivalence.max_abs_deviation = std::max(equivalence.max_abs_deviation, dev);
      }

      for (const Partition& b : all_partitions(n, std::min(k, n))) {
        const double brute = fiber_sums.at(padded_sizes(b, k));
        const double closed = std::exp(crp_class_log_prob(b, k));
        const double rel = std::abs(brute - closed) / closed;
        ++reconstruction.instances;
        reconstruction.max_abs_deviation = std::max(reconstruction.max_abs_deviation, rel);
      }
    }
  }

  // Seeded random occupancy vectors for the endpoint and sharpening checks.
  std::mt19937_64 gen(20240915u);
  const double dc_grid[] = {1.0, 2.0, 4.0, 10.0};
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(gen() % 6);
    CountVector counts(static_cast<std::size_t>(k));
    for (auto& c : counts) c = static_cast<int>(gen() % 30);
    if (counts[0] < 2) counts[0] = 2;  // sharpening needs a block of >= 2

    for (double dc : dc_grid) {
      const double a = gfic_log_score(counts, 0.5 * dc);
      const double b = fic_log_score(counts, dc);
      note_finite(a);
      note_finite(b);
      ++endpoint.instances;
      endpoint.max_abs_deviation = std::max(endpoint.max_abs_deviation, std::abs(a - b));
    }

    const double lo = fic_log_score(counts, 1.0 + (trial % 7));
    const double hi = fic_log_score(counts, 2.0 + (trial % 7));
    ++sharpening.instances;
    // hi uses the larger dc and must be strictly smaller.
    sharpening.max_abs_deviation = std::max(sharpening.max_abs_deviation,
                                            hi >= lo ? hi - lo + 1.0 : 0.0);
  }

  std::vector<IdentityReport> reports{reconstruction, equivalence, endpoint,
                                      sharpening, finiteness};
  for (auto& r : reports) r.pass = r.max_abs_deviation <= r.tolerance;
  return reports;
}

std::vector<NormalizerRow> normalizer_table(int n_max, int k_max) {
  std::vector<NormalizerRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 1; k <= k_max; ++k) {
      rows.push_back({n, k, crp_fixed_k_normalizer_compositions(n, k),
                      crp_fixed_k_normalizer_partitions(n, k)});
    }
  }
  return rows;
}

std::vector<SequenceMassRow> sequence_mass_table(int n_max, int k_max) {
  if (n_max > 8) {
    throw BudgetError("sequence mass table: n_max = " + std::to_string(n_max) +
                      " exceeds the exhaustive limit of 8");
  }
  std::vector<SequenceMassRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 1; k <= k_max; ++k) {
      double mass = 0.0;
      AssignmentEnumerator e(n, k);
      Assignment z;
      while (e.next(z)) mass += std::exp(crp_sequence_log_prob(z));
      rows.push_back({n, k, mass});
    }
  }
  return rows;
}

}  // namespace fablab
