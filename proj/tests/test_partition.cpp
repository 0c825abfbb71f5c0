// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fablab/partition.hpp"

using namespace fablab;

namespace {

// Independent Bell-number oracle via the Bell triangle.
std::uint64_t bell_number(int n) {
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next;
    next.push_back(row.back());
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

Assignment make_assignment(std::vector<int> labels, int k) {
  return Assignment{std::move(labels), k};
}

int count_stream(int n, int k) {
  AssignmentEnumerator e(n, k);
  Assignment z;
  int total = 0;
  while (e.next(z)) ++total;
  return total;
}

}  // namespace

TEST_CASE("assignment_counts") {
  CHECK(assignment_counts(make_assignment({1}, 1)) == CountVector{1});
  CHECK(assignment_counts(make_assignment({1, 1, 2}, 2)) == CountVector{2, 1});
  CHECK(assignment_counts(make_assignment({1, 1}, 3)) == CountVector{2, 0, 0});
  CHECK_THROWS_AS(assignment_counts(make_assignment({1, 4}, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assignment_counts(make_assignment({}, 1)), std::invalid_argument);
}

TEST_CASE("assignment_counts sums to N") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 12);
    const int k = 1 + static_cast<int>(gen() % 5);
    std::vector<int> labels(n);
    for (auto& l : labels) l = 1 + static_cast<int>(gen() % k);
    const CountVector counts = assignment_counts(make_assignment(labels, k));
    int total = 0;
    for (int c : counts) total += c;
    CHECK(total == n);
    CHECK(static_cast<int>(counts.size()) == k);
  }
}

TEST_CASE("partition_of") {
  CHECK(partition_of(make_assignment({1}, 1)) == Partition{{{1}}});
  CHECK(partition_of(make_assignment({2, 2, 1}, 2)) == Partition{{{1, 2}, {3}}});
  CHECK(partition_of(make_assignment({1, 1, 2}, 2)) ==
        partition_of(make_assignment({2, 2, 1}, 2)));
  // Empty slots vanish.
  CHECK(partition_of(make_assignment({3, 3}, 5)) == Partition{{{1, 2}}});
}

TEST_CASE("partition_of is invariant under label permutation") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 10);
    const int k = 1 + static_cast<int>(gen() % 5);
    std::vector<int> labels(n);
    for (auto& l : labels) l = 1 + static_cast<int>(gen() % k);
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i + 1;
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> relabeled(n);
    for (int i = 0; i < n; ++i) relabeled[i] = perm[labels[i] - 1];
    CHECK(partition_of(make_assignment(labels, k)) ==
          partition_of(make_assignment(relabeled, k)));
  }
}

TEST_CASE("make_partition canonicalizes and validates") {
  const Partition p = make_partition({{3}, {2, 1}});
  CHECK(p == Partition{{{1, 2}, {3}}});
  CHECK(p.to_string() == "{1,2}|{3}");
  CHECK_THROWS_AS(make_partition({{1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_partition({{1}, {3}}), std::invalid_argument);
  CHECK_THROWS_AS(make_partition({{1}, {}}), std::invalid_argument);
}

TEST_CASE("class_size") {
  CHECK(class_size(make_partition({{1, 2, 3}}), 3) == 1);
  CHECK(class_size(make_partition({{1, 2}, {3}}), 3) == 3);
  CHECK(class_size(make_partition({{1}, {2}, {3}}), 3) == 6);
  // 20 singletons: 20! exactly, near the top of the 64-bit range.
  std::vector<std::vector<int>> singletons;
  for (int i = 1; i <= 20; ++i) singletons.push_back({i});
  CHECK(class_size(make_partition(singletons), 20) == 2432902008176640000ULL);
  CHECK_THROWS_AS(class_size(make_partition({{1, 2}}), 3), std::invalid_argument);
}

TEST_CASE("enumerate_assignments counts and uniqueness") {
  CHECK(count_stream(2, 2) == 4);
  CHECK(count_stream(3, 2) == 8);
  CHECK(count_stream(1, 5) == 5);

  AssignmentEnumerator e(3, 3);
  Assignment z;
  std::set<std::vector<int>> seen;
  while (e.next(z)) {
    CHECK(z.k_slots == 3);
    seen.insert(z.labels);
  }
  CHECK(seen.size() == 27);
}

TEST_CASE("enumerate_assignments budget") {
  CHECK_THROWS_AS(AssignmentEnumerator(30, 10, 1000), BudgetError);
  try {
    AssignmentEnumerator e(5, 4, 1000);  // 4^5 = 1024 > 1000
    FAIL("expected BudgetError");
  } catch (const BudgetError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("1024") != std::string::npos);
    CHECK(msg.find("1000") != std::string::npos);
  }
  // Exactly at the budget is allowed.
  CHECK_NOTHROW(AssignmentEnumerator(5, 4, 1024));
}

TEST_CASE("enumerate_partitions examples") {
  CHECK(all_partitions(3, 3).size() == 5);
  CHECK(all_partitions(3, 2).size() == 4);
  CHECK(all_partitions(1, 1).size() == 1);

  // Canonical form and uniqueness.
  std::set<std::string> seen;
  for (const Partition& p : all_partitions(6, 6)) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      CHECK(std::is_sorted(p.blocks[b].begin(), p.blocks[b].end()));
      if (b > 0) CHECK(p.blocks[b - 1].front() < p.blocks[b].front());
    }
    seen.insert(p.to_string());
  }
  CHECK(seen.size() == bell_number(6));
}

TEST_CASE("enumerate_partitions matches the Bell oracle") {
  for (int n = 1; n <= 10; ++n) {
    CHECK(all_partitions(n, n).size() == bell_number(n));
  }
  CHECK(bell_number(10) == 115975);
}

TEST_CASE("enumerate_partitions budget") {
  CHECK_THROWS_AS(PartitionEnumerator(13, 13), BudgetError);
  CHECK_THROWS_AS(PartitionEnumerator(10, 10, 1000), BudgetError);
}

TEST_CASE("enumeration streams restart independently") {
  AssignmentEnumerator a(2, 2);
  AssignmentEnumerator b(2, 2);
  Assignment za, zb;
  CHECK(a.next(za));
  CHECK(a.next(za));
  CHECK(b.next(zb));
  CHECK(zb.labels == std::vector<int>{1, 1});
  CHECK(za.labels == std::vector<int>{1, 2});
}

TEST_CASE("restricted_bell_number") {
  CHECK(restricted_bell_number(3, 3) == 5);
  CHECK(restricted_bell_number(3, 2) == 4);
  CHECK(restricted_bell_number(8, 8) == 4140);
  for (int n = 1; n <= 9; ++n) CHECK(restricted_bell_number(n, n) == bell_number(n));
}
