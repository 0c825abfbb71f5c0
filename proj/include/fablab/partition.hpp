// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fablab {

/// Thrown when an enumeration request exceeds the item budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration budget in items. Defaults to 10^7; the FABLAB_BUDGET
/// environment variable overrides it (read once per process).
std::uint64_t enumeration_budget();

/// Cluster labels for N observations over k_slots slots. Labels are 1-based
/// and slots may be empty.
struct Assignment {
  std::vector<int> labels;
  int k_slots = 1;

  int n() const { return static_cast<int>(labels.size()); }
};

/// Throws std::invalid_argument if z violates the Assignment invariants.
void validate(const Assignment& z);

/// Per-slot occupancy counts; counts.size() == k_slots, sum == N.
using CountVector = std::vector<int>;

/// Set partition of {1..n}. Blocks are nonempty, disjoint, cover {1..n},
/// sorted ascending by minimum element, elements ascending within a block.
/// Equality is structural.
struct Partition {
  std::vector<std::vector<int>> blocks;

  int n() const;
  int block_count() const { return static_cast<int>(blocks.size()); }
  std::vector<int> block_sizes() const;
  std::string to_string() const;  // "{1,2}|{3,4}"

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Brings arbitrary nonempty disjoint blocks into canonical order and
/// validates that they partition {1..n}.
Partition make_partition(std::vector<std::vector<int>> blocks);

CountVector assignment_counts(const Assignment& z);

/// The label classes of z as a canonical partition; empty slots vanish and
/// any relabeling of z yields the identical value.
Partition partition_of(const Assignment& z);

/// N!/prod n_k! over the block sizes of b, exact. Requires n <= 20 so the
/// value fits in 64 bits; throws std::overflow_error beyond that.
std::uint64_t class_size(const Partition& b, int n);

/// Streams all k^n assignments of n items to k slots in odometer order
/// (last position fastest). Restartable by constructing a fresh instance.
class AssignmentEnumerator {
 public:
  AssignmentEnumerator(int n, int k);
  AssignmentEnumerator(int n, int k, std::uint64_t budget);

  /// Writes the next assignment into out; returns false when exhausted.
  bool next(Assignment& out);

 private:
  int n_;
  int k_;
  bool fresh_ = true;
  bool done_ = false;
  std::vector<int> labels_;
};

/// Streams every set partition of {1..n} with at most k_max blocks, each
/// exactly once, in restricted-growth-string order (canonical form).
class PartitionEnumerator {
 public:
  PartitionEnumerator(int n, int k_max);
  PartitionEnumerator(int n, int k_max, std::uint64_t budget);

  bool next(Partition& out);

 private:
  int n_;
  int k_max_;
  bool fresh_ = true;
  bool done_ = false;
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;
};

/// Collects the full PartitionEnumerator stream.
std::vector<Partition> all_partitions(int n, int k_max);
std::vector<Partition> all_partitions(int n, int k_max, std::uint64_t budget);

/// Number of set partitions of {1..n} with at most k_max blocks
/// (sum of Stirling numbers of the second kind), exact for n <= 20.
std::uint64_t restricted_bell_number(int n, int k_max);

}  // namespace fablab
