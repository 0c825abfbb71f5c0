// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace fablab {

namespace {

constexpr std::uint64_t kDefaultBudget = 10'000'000;

std::uint64_t read_budget_from_env() {
  const char* raw = std::getenv("FABLAB_BUDGET");
  if (raw == nullptr || *raw == '\0') return kDefaultBudget;
  std::uint64_t value = 0;
  const char* end = raw + std::string_view(raw).size();
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw std::invalid_argument(
        "FABLAB_BUDGET must be a positive integer, got \"" + std::string(raw) +
        "\"");
  }
  return value;
}

/// k^n, saturated at UINT64_MAX on overflow.
std::uint64_t saturating_pow(std::uint64_t k, int n) {
  std::uint64_t acc = 1;
  for (int i = 0; i < n; ++i) {
    if (k != 0 && acc > UINT64_MAX / k) return UINT64_MAX;
    acc *= k;
  }
  return acc;
}

}  // namespace

std::uint64_t enumeration_budget() {
  static const std::uint64_t budget = read_budget_from_env();
  return budget;
}

void validate(const Assignment& z) {
  if (z.labels.empty()) throw std::invalid_argument("Assignment: N must be >= 1");
  if (z.k_slots < 1) throw std::invalid_argument("Assignment: k_slots must be >= 1");
  for (std::size_t i = 0; i < z.labels.size(); ++i) {
    const int l = z.labels[i];
    if (l < 1 || l > z.k_slots) {
      throw std::invalid_argument("Assignment: label " + std::to_string(l) +
                                  " at position " + std::to_string(i + 1) +
                                  " outside [1, " + std::to_string(z.k_slots) +
                                  "]");
    }
  }
}

int Partition::n() const {
  int total = 0;
  for (const auto& block : blocks) total += static_cast<int>(block.size());
  return total;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(blocks.size());
  for (const auto& block : blocks) sizes.push_back(static_cast<int>(block.size()));
  return sizes;
}

std::string Partition::to_string() const {
  std::string out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b > 0) out += '|';
    out += '{';
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(blocks[b][i]);
    }
    out += '}';
  }
  return out;
}

Partition make_partition(std::vector<std::vector<int>> blocks) {
  for (auto& block : blocks) {
    if (block.empty()) throw std::invalid_argument("Partition: empty block");
    std::sort(block.begin(), block.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Partition p{std::move(blocks)};
  const int total = p.n();
  std::vector<char> seen(static_cast<std::size_t>(total) + 1, 0);
  for (const auto& block : p.blocks) {
    for (int e : block) {
      if (e < 1 || e > total || seen[e]) {
        throw std::invalid_argument("Partition: blocks must partition {1..n}");
      }
      seen[e] = 1;
    }
  }
  return p;
}

CountVector assignment_counts(const Assignment& z) {
  validate(z);
  CountVector counts(static_cast<std::size_t>(z.k_slots), 0);
  for (int l : z.labels) ++counts[static_cast<std::size_t>(l - 1)];
  return counts;
}

Partition partition_of(const Assignment& z) {
  validate(z);
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(z.k_slots));
  for (std::size_t i = 0; i < z.labels.size(); ++i) {
    buckets[static_cast<std::size_t>(z.labels[i] - 1)].push_back(
        static_cast<int>(i + 1));
  }
  std::vector<std::vector<int>> blocks;
  for (auto& bucket : buckets) {
    if (!bucket.empty()) blocks.push_back(std::move(bucket));
  }
  // Elements were appended in ascending order, so each block is sorted and
  // front() is its minimum.
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return Partition{std::move(blocks)};
}

std::uint64_t class_size(const Partition& b, int n) {
  if (b.n() != n) {
    throw std::invalid_argument("class_size: partition does not cover {1..n}");
  }
  // Multinomial via a product of binomials over prefix sums; every partial
  // product divides the final value, so it stays within 64 bits when the
  // result does.
  std::uint64_t result = 1;
  std::uint64_t prefix = 0;
  for (int size : b.block_sizes()) {
    prefix += static_cast<std::uint64_t>(size);
    std::uint64_t binom = 1;
    for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(size); ++i) {
      const std::uint64_t numer = prefix - static_cast<std::uint64_t>(size) + i;
      if (binom > UINT64_MAX / numer) {
        throw std::overflow_error("class_size: value exceeds 64 bits");
      }
      binom = binom * numer / i;
    }
    if (binom != 0 && result > UINT64_MAX / binom) {
      throw std::overflow_error("class_size: value exceeds 64 bits");
    }
    result *= binom;
  }
  return result;
}

AssignmentEnumerator::AssignmentEnumerator(int n, int k)
    : AssignmentEnumerator(n, k, enumeration_budget()) {}

AssignmentEnumerator::AssignmentEnumerator(int n, int k, std::uint64_t budget)
    : n_(n), k_(k) {
  if (n < 1) throw std::invalid_argument("enumerate_assignments: n must be >= 1");
  if (k < 1) throw std::invalid_argument("enumerate_assignments: k must be >= 1");
  const std::uint64_t total = saturating_pow(static_cast<std::uint64_t>(k), n);
  if (total > budget) {
    const std::string shown = total == UINT64_MAX
                                  ? std::string("more than 2^64")
                                  : std::to_string(total);
    throw BudgetError("enumerate_assignments: k^n = " + shown +
                      " items exceeds budget " + std::to_string(budget));
  }
  labels_.assign(static_cast<std::size_t>(n), 1);
}

bool AssignmentEnumerator::next(Assignment& out) {
  if (done_) return false;
  if (fresh_) {
    fresh_ = false;
  } else {
    int i = n_ - 1;
    while (i >= 0 && labels_[static_cast<std::size_t>(i)] == k_) {
      labels_[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) {
      done_ = true;
      return false;
    }
    ++labels_[static_cast<std::size_t>(i)];
  }
  out.labels = labels_;
  out.k_slots = k_;
  return true;
}

PartitionEnumerator::PartitionEnumerator(int n, int k_max)
    : PartitionEnumerator(n, k_max, enumeration_budget()) {}

PartitionEnumerator::PartitionEnumerator(int n, int k_max, std::uint64_t budget)
    : n_(n), k_max_(k_max) {
  if (n < 1) throw std::invalid_argument("enumerate_partitions: n must be >= 1");
  if (k_max < 1) throw std::invalid_argument("enumerate_partitions: k_max must be >= 1");
  if (n > 12) {
    throw BudgetError("enumerate_partitions: n = " + std::to_string(n) +
                      " exceeds the supported maximum of 12 (Bell(12) = 4213597)");
  }
  const std::uint64_t total = restricted_bell_number(n, k_max);
  if (total > budget) {
    throw BudgetError("enumerate_partitions: " + std::to_string(total) +
                      " partitions exceed budget " + std::to_string(budget));
  }
  rgs_.assign(static_cast<std::size_t>(n), 0);
  prefix_max_.assign(static_cast<std::size_t>(n), 0);
}

bool PartitionEnumerator::next(Partition& out) {
  if (done_) return false;
  if (fresh_) {
    fresh_ = false;
  } else {
    int i = n_ - 1;
    for (; i >= 1; --i) {
      const int cap = std::min(prefix_max_[static_cast<std::size_t>(i - 1)] + 1,
                               k_max_ - 1);
      if (rgs_[static_cast<std::size_t>(i)] < cap) break;
    }
    if (i < 1) {
      done_ = true;
      return false;
    }
    ++rgs_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n_; ++j) rgs_[static_cast<std::size_t>(j)] = 0;
    for (int j = i; j < n_; ++j) {
      prefix_max_[static_cast<std::size_t>(j)] =
          std::max(prefix_max_[static_cast<std::size_t>(j - 1)],
                   rgs_[static_cast<std::size_t>(j)]);
    }
  }
  const int num_blocks = prefix_max_[static_cast<std::size_t>(n_ - 1)] + 1;
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(num_blocks));
  for (int i = 0; i < n_; ++i) {
    blocks[static_cast<std::size_t>(rgs_[static_cast<std::size_t>(i)])].push_back(i + 1);
  }
  // Restricted growth order puts blocks in first-occurrence order, which is
  // exactly ascending-minimum order.
  out.blocks = std::move(blocks);
  return true;
}

std::vector<Partition> all_partitions(int n, int k_max) {
  return all_partitions(n, k_max, enumeration_budget());
}

std::vector<Partition> all_partitions(int n, int k_max, std::uint64_t budget) {
  std::vector<Partition> out;
  PartitionEnumerator e(n, k_max, budget);
  Partition p;
  while (e.next(p)) out.push_back(p);
  return out;
}

std::uint64_t restricted_bell_number(int n, int k_max) {
  if (n < 1 || k_max < 1) {
    throw std::invalid_argument("restricted_bell_number: n and k_max must be >= 1");
  }
  if (n > 20) {
    throw std::overflow_error("restricted_bell_number: n > 20 overflows 64 bits");
  }
  // Stirling numbers of the second kind, S(i, j) = S(i-1, j-1) + j*S(i-1, j).
  std::vector<std::vector<std::uint64_t>> s(
      static_cast<std::size_t>(n) + 1,
      std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= i; ++j) {
      s[i][j] = s[i - 1][j - 1] + static_cast<std::uint64_t>(j) * s[i - 1][j];
    }
  }
  std::uint64_t total = 0;
  for (int j = 1; j <= std::min(n, k_max); ++j) total += s[n][j];
  return total;
}

}  // namespace fablab
