// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/priors.hpp"

#include <charconv>
#include <cmath>

namespace fablab {

namespace {

std::uint64_t binomial_or_saturate(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(k); ++i) {
    const std::uint64_t numer = static_cast<std::uint64_t>(n - k) + i;
    if (r > cap / numer) return cap + 1;
    r = r * numer / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

std::string render_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

PriorSpec PriorSpec::crp() { return PriorSpec{PriorKind::Crp, 0.0, 0.0, true}; }

PriorSpec PriorSpec::fic(double dc) {
  if (!(dc > 0.0)) throw std::invalid_argument("PriorSpec: FIC requires dc > 0");
  return PriorSpec{PriorKind::Fic, dc, 0.0, false};
}

PriorSpec PriorSpec::gfic(double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("PriorSpec: GFIC requires d >= 0");
  return PriorSpec{PriorKind::Gfic, 0.0, d, false};
}

PriorSpec PriorSpec::uniform() {
  return PriorSpec{PriorKind::Uniform, 0.0, 0.0, true};
}

std::string PriorSpec::name() const {
  switch (kind) {
    case PriorKind::Crp: return "crp";
    case PriorKind::Fic: return "fic";
    case PriorKind::Gfic: return "gfic";
    case PriorKind::Uniform: return "uniform";
  }
  return "unknown";
}

std::string PriorSpec::param_string() const {
  switch (kind) {
    case PriorKind::Fic: return render_double(dc);
    case PriorKind::Gfic: return render_double(d);
    default: return "";
  }
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: n must be >= 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double crp_sequence_log_prob(const Assignment& z) {
  const CountVector counts = assignment_counts(z);
  double log_num = 0.0;
  for (int c : counts) {
    if (c > 0) log_num += log_factorial(c - 1);
  }
  return log_num - log_factorial(z.n()) - log_factorial(z.k_slots);
}

double crp_class_log_prob(const Partition& b, int k_slots) {
  if (k_slots < b.block_count()) {
    throw std::invalid_argument(
        "crp_class_log_prob: k_slots = " + std::to_string(k_slots) +
        " is smaller than the block count " + std::to_string(b.block_count()));
  }
  double log_prod = 0.0;
  for (int size : b.block_sizes()) log_prod += std::log(static_cast<double>(size));
  return -log_factorial(k_slots) - log_prod;
}

double crp_fixed_k_normalizer_compositions(int n, int k) {
  return crp_fixed_k_normalizer_compositions(n, k, enumeration_budget());
}

double crp_fixed_k_normalizer_compositions(int n, int k, std::uint64_t budget) {
  if (n < 1 || k < 1) {
    throw std::invalid_argument("normalizer: n and k must be >= 1");
  }
  const std::uint64_t tuples = binomial_or_saturate(n + k - 1, k - 1, budget);
  if (tuples > budget) {
    throw BudgetError("normalizer: C(n+k-1, k-1) tuples exceed budget " +
                      std::to_string(budget));
  }
  // Recurse over slots; prod accumulates only nonzero counts.
  double sum = 0.0;
  auto recurse = [&](auto&& self, int slot, int remaining, double prod) -> void {
    if (slot == k) {
      if (remaining == 0) sum += 1.0 / prod;
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      self(self, slot + 1, remaining - c, c > 0 ? prod * c : prod);
    }
  };
  recurse(recurse, 0, n, 1.0);
  return sum;
}

double crp_fixed_k_log_normalizer_compositions(int n, int k) {
  return std::log(crp_fixed_k_normalizer_compositions(n, k));
}

double crp_fixed_k_normalizer_partitions(int n, int k) {
  return crp_fixed_k_normalizer_partitions(n, k, enumeration_budget());
}

double crp_fixed_k_normalizer_partitions(int n, int k, std::uint64_t budget) {
  PartitionEnumerator e(n, k, budget);
  Partition b;
  double sum = 0.0;
  while (e.next(b)) {
    double prod = 1.0;
    for (int size : b.block_sizes()) prod *= static_cast<double>(size);
    sum += 1.0 / prod;
  }
  return sum;
}

double crp_fixed_k_log_normalizer_partitions(int n, int k) {
  return std::log(crp_fixed_k_normalizer_partitions(n, k));
}

double fic_log_score(const CountVector& counts, double dc) {
  if (!(dc > 0.0)) throw std::invalid_argument("fic_log_score: dc must be > 0");
  return gfic_log_score(counts, 0.5 * dc);
}

double gfic_log_score(const CountVector& counts, double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("gfic_log_score: d must be >= 0");
  double sum_log = 0.0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("gfic_log_score: negative count");
    if (c > 0) sum_log += std::log(static_cast<double>(c));
  }
  return -d * sum_log;
}

bool gfic_d_in_nominal_range(double d, double dc) {
  return d > 1.0 && d < 0.5 * dc;
}

double log_prior(const PriorSpec& spec, const Assignment& z) {
  switch (spec.kind) {
    case PriorKind::Crp: return crp_sequence_log_prob(z);
    case PriorKind::Fic: return fic_log_score(assignment_counts(z), spec.dc);
    case PriorKind::Gfic: return gfic_log_score(assignment_counts(z), spec.d);
    case PriorKind::Uniform: return 0.0;
  }
  throw std::logic_error("log_prior: unreachable");
}

}  // namespace fablab
