// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fablab/gmm.hpp"
#include "fablab/lab.hpp"

using namespace fablab;
using doctest::Approx;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

// Naive per-element E-step used as the oracle for the vectorized one.
Matrix naive_e_step(const Matrix& x, const GmmModel& model, double d,
                    const Vector& prev_counts) {
  Matrix q(x.rows(), model.components());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> logs(static_cast<std::size_t>(model.components()));
    double max_log = -1e300;
    for (int c = 0; c < model.components(); ++c) {
      double lp = std::log(model.weights(c));
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double v = model.variances(c, j);
        const double diff = x(i, j) - model.means(c, j);
        lp += -0.5 * (kLog2Pi + std::log(v)) - diff * diff / (2.0 * v);
      }
      if (d > 0.0) lp -= d / prev_counts(c);
      logs[static_cast<std::size_t>(c)] = lp;
      max_log = std::max(max_log, lp);
    }
    double sum = 0.0;
    for (double lp : logs) sum += std::exp(lp - max_log);
    for (int c = 0; c < model.components(); ++c) {
      q(i, c) = std::exp(logs[static_cast<std::size_t>(c)] - max_log) / sum;
    }
  }
  return q;
}

GeneratedData two_cluster_data(std::uint64_t seed, int n = 40) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.k_true = 2;
  cfg.n = n;
  cfg.dims = 1;
  cfg.separation = 10.0;
  cfg.variance = 1.0;
  return generate_gmm_data(cfg);
}

}  // namespace

TEST_CASE("component_log_pdf") {
  CHECK(component_log_pdf(vec1(0.0), vec1(0.0), vec1(1.0)) ==
        Approx(-0.9189385332046727).epsilon(1e-12));
  for (double v : {0.25, 1.0, 9.0}) {
    CHECK(component_log_pdf(vec1(3.0), vec1(3.0), vec1(v)) ==
          Approx(-0.5 * std::log(2.0 * std::numbers::pi * v)).epsilon(1e-12));
  }
  CHECK(component_log_pdf(vec1(1.0), vec1(0.0), vec1(1.0)) ==
        Approx(-1.4189385332046727).epsilon(1e-12));
  CHECK_THROWS_AS(component_log_pdf(vec1(0.0), vec1(0.0), vec1(0.0)),
                  std::invalid_argument);
}

TEST_CASE("variance_floor") {
  Matrix x(3, 2);
  x << 0.0, 5.0, 2.0, 5.0, 4.0, 5.0;
  const Vector floor = variance_floor(x, 1e-3);
  CHECK(floor(0) == Approx(1e-3 * 8.0 / 3.0));  // biased variance of {0,2,4}
  CHECK(floor(1) == 1e-3);                      // zero-spread feature falls back
  CHECK_THROWS_AS(variance_floor(x, 0.0), std::invalid_argument);
}

TEST_CASE("mle_fit_given_assignment") {
  Matrix x(2, 1);
  x << 0.0, 2.0;
  const Vector floor = vec1(1e-6);

  GmmModel m = mle_fit_given_assignment(x, Assignment{{1, 1}, 1}, floor);
  CHECK(m.components() == 1);
  CHECK(m.weights(0) == 1.0);
  CHECK(m.means(0, 0) == Approx(1.0));
  CHECK(m.variances(0, 0) == Approx(1.0));

  Matrix single(1, 1);
  single << 5.0;
  m = mle_fit_given_assignment(single, Assignment{{1}, 1}, floor);
  CHECK(m.means(0, 0) == 5.0);
  CHECK(m.variances(0, 0) == 1e-6);

  Matrix x4(4, 1);
  x4 << 0.0, 0.0, 4.0, 4.0;
  m = mle_fit_given_assignment(x4, Assignment{{1, 1, 2, 2}, 2}, floor);
  CHECK(m.components() == 2);
  CHECK(m.weights(0) == 0.5);
  CHECK(m.weights(1) == 0.5);
  CHECK(m.means(0, 0) == 0.0);
  CHECK(m.means(1, 0) == 4.0);
  CHECK(m.variances(0, 0) == 1e-6);
  CHECK(m.variances(1, 0) == 1e-6);

  // Empty slots are dropped.
  m = mle_fit_given_assignment(x4, Assignment{{1, 1, 3, 3}, 3}, floor);
  CHECK(m.components() == 2);
}

TEST_CASE("fab_e_step with d=0 is the plain EM responsibility") {
  const GeneratedData data = two_cluster_data(21);
  GmmModel model = mle_fit_given_assignment(
      data.x, data.labels, variance_floor(data.x, 1e-6));
  const Vector counts = Vector::Constant(model.components(),
                                         data.x.rows() / 2.0);
  const EStep step = fab_e_step(data.x, model, 0.0, counts);
  const Matrix oracle = naive_e_step(data.x, model, 0.0, counts);
  CHECK((step.responsibilities - oracle).cwiseAbs().maxCoeff() < 1e-13);

  for (Eigen::Index i = 0; i < step.responsibilities.rows(); ++i) {
    CHECK(step.responsibilities.row(i).sum() == Approx(1.0).epsilon(1e-12));
  }
  CHECK(step.soft_counts.sum() == Approx(static_cast<double>(data.x.rows())));
}

TEST_CASE("fab_e_step symmetry gives half-half responsibilities") {
  Matrix x(2, 1);
  x << -1.0, 1.0;
  GmmModel model;
  model.weights = Vector::Constant(2, 0.5);
  model.means = Matrix(2, 1);
  model.means << -3.0, 3.0;
  model.variances = Matrix::Constant(2, 1, 2.0);
  const Vector counts = Vector::Constant(2, 1.0);

  SUBCASE("at a symmetric point") {
    Matrix mid(1, 1);
    mid << 0.0;
    const EStep step = fab_e_step(mid, model, 1.5, counts);
    CHECK(step.responsibilities(0, 0) == Approx(0.5).epsilon(1e-14));
    CHECK(step.responsibilities(0, 1) == Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("shrinkage preserves the symmetry") {
    const EStep step = fab_e_step(x, model, 2.0, counts);
    CHECK(step.soft_counts(0) == Approx(step.soft_counts(1)).epsilon(1e-12));
  }
}

TEST_CASE("fab_e_step starves the smaller component when d > 0") {
  const GeneratedData data = two_cluster_data(77, 60);
  GmmModel model = mle_fit_given_assignment(
      data.x, data.labels, variance_floor(data.x, 1e-6));
  Vector counts(2);
  counts << 45.0, 15.0;  // previous soft counts, second component smaller

  const EStep plain = fab_e_step(data.x, model, 0.0, counts);
  const EStep shrunk = fab_e_step(data.x, model, 1.0, counts);
  CHECK(shrunk.soft_counts(1) < plain.soft_counts(1));
  CHECK(shrunk.soft_counts(0) > plain.soft_counts(0));
}

TEST_CASE("fab_m_step") {
  Matrix x(2, 1);
  x << 0.0, 2.0;
  const Vector floor = vec1(1e-6);

  SUBCASE("hard one-hot responsibilities reduce to the assignment MLE") {
    Matrix x4(4, 1);
    x4 << 0.0, 1.0, 4.0, 6.0;
    Matrix q = Matrix::Zero(4, 2);
    q(0, 0) = q(1, 0) = 1.0;
    q(2, 1) = q(3, 1) = 1.0;
    const GmmModel soft = fab_m_step(x4, q, floor);
    const GmmModel hard =
        mle_fit_given_assignment(x4, Assignment{{1, 1, 2, 2}, 2}, floor);
    CHECK((soft.weights - hard.weights).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((soft.means - hard.means).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((soft.variances - hard.variances).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("uniform responsibilities pool the data") {
    const Matrix q = Matrix::Constant(2, 2, 0.5);
    const GmmModel m = fab_m_step(x, q, floor);
    CHECK(m.means(0, 0) == Approx(1.0));
    CHECK(m.means(1, 0) == Approx(1.0));
    CHECK(m.variances(0, 0) == Approx(1.0));
    CHECK(m.variances(1, 0) == Approx(1.0));
    CHECK(m.weights(0) == Approx(0.5));
    CHECK(m.weights(1) == Approx(0.5));
  }
  SUBCASE("a zero column yields weight zero") {
    Matrix q(2, 2);
    q << 1.0, 0.0, 1.0, 0.0;
    const GmmModel m = fab_m_step(x, q, floor);
    CHECK(m.weights(1) == 0.0);
    CHECK(m.variances(1, 0) == 1e-6);
  }
}

TEST_CASE("fab_objective") {
  Matrix x(2, 1);
  x << 0.0, 2.0;
  const Vector floor = vec1(1e-6);

  SUBCASE("d=0 equals the plain lower bound") {
    const Matrix q = Matrix::Constant(2, 2, 0.5);
    const GmmModel m = fab_m_step(x, q, floor);
    // Reference: sum_ik q [log w + log pdf] + entropy, no penalty.
    double expected = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < 2; ++c) {
        const double diff = x(i, 0) - m.means(c, 0);
        const double lp = std::log(m.weights(c)) -
                          0.5 * (kLog2Pi + std::log(m.variances(c, 0))) -
                          diff * diff / (2.0 * m.variances(c, 0));
        expected += 0.5 * lp;
      }
    }
    expected += 2.0 * std::log(2.0);  // two uniform rows
    CHECK(fab_objective(x, q, m, 0.0) == Approx(expected).epsilon(1e-12));
  }

  SUBCASE("hard responsibilities with d=1 pay the log component sizes") {
    Matrix x3(3, 1);
    x3 << 0.0, 2.0, 9.0;
    Matrix q = Matrix::Zero(3, 2);
    q(0, 0) = q(1, 0) = 1.0;
    q(2, 1) = 1.0;
    const GmmModel m = fab_m_step(x3, q, floor);
    const double complete_loglik =
        fab_objective(x3, q, m, 0.0);  // entropy of hard rows is zero
    CHECK(fab_objective(x3, q, m, 1.0) ==
          Approx(complete_loglik - std::log(2.0)).epsilon(1e-12));
  }

  SUBCASE("uniform rows contribute N log k of entropy") {
    const Matrix q = Matrix::Constant(2, 2, 0.5);
    const GmmModel m = fab_m_step(x, q, floor);
    const double with_entropy = fab_objective(x, q, m, 0.0);
    double no_entropy = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < 2; ++c) {
        const double diff = x(i, 0) - m.means(c, 0);
        no_entropy += q(i, c) * (std::log(m.weights(c)) -
                                 0.5 * (kLog2Pi + std::log(m.variances(c, 0))) -
                                 diff * diff / (2.0 * m.variances(c, 0)));
      }
    }
    CHECK(with_entropy - no_entropy == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("fab_fit with d=0 and pruning off behaves as plain EM") {
  const GeneratedData data = two_cluster_data(5, 50);
  FabConfig cfg;
  cfg.k_init = 4;
  cfg.d = 0.0;
  cfg.prune_threshold = 0.0;
  cfg.seed = 5;
  cfg.max_iters = 60;
  const FabResult result = fab_fit(data.x, cfg);

  CHECK(result.model.components() == 4);
  for (const auto& rec : result.trace.records) CHECK(rec.pruned.empty());
  for (std::size_t i = 1; i < result.trace.records.size(); ++i) {
    const double prev = result.trace.records[i - 1].objective;
    const double next = result.trace.records[i].objective;
    CHECK(next >= prev - 1e-8 * std::max(1.0, std::abs(prev)));
  }
}

TEST_CASE("fab_fit objective is non-decreasing between non-pruning iterations") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    const GeneratedData data = two_cluster_data(seed, 80);
    FabConfig cfg;
    cfg.k_init = 8;
    cfg.d = 1.5;
    cfg.seed = seed;
    const FabResult result = fab_fit(data.x, cfg);
    for (std::size_t i = 1; i < result.trace.records.size(); ++i) {
      if (!result.trace.records[i].pruned.empty()) continue;
      const double prev = result.trace.records[i - 1].objective;
      const double next = result.trace.records[i].objective;
      CHECK(next >= prev - 1e-8 * std::max(1.0, std::abs(prev)));
    }
  }
}

TEST_CASE("fab_fit with k_init=1 returns a single component") {
  const GeneratedData data = two_cluster_data(9, 30);
  FabConfig cfg;
  cfg.k_init = 1;
  cfg.d = 3.0;
  cfg.seed = 9;
  const FabResult result = fab_fit(data.x, cfg);
  CHECK(result.model.components() == 1);
  CHECK(result.model.weights(0) == Approx(1.0));
}

TEST_CASE("fab_fit separates two far clusters") {
  // 200 points from components at 0 and 10 (separation 10 sd); k_init 10,
  // d = 1 (= dc/2 for one feature) should recover 2 components. Kmeans-style
  // init and a prune threshold of 5% of the data; flat random rows leave the
  // components racing to starve each other before they separate.
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenConfig gen;
    gen.seed = seed;
    gen.k_true = 2;
    gen.n = 200;
    gen.dims = 1;
    gen.separation = 10.0;
    gen.variance = 1.0;
    const GeneratedData data = generate_gmm_data(gen);
    FabConfig cfg;
    cfg.k_init = 10;
    cfg.d = 1.0;
    cfg.seed = seed;
    cfg.init = InitMethod::KMeansStyle;
    cfg.prune_threshold = 10.0;
    cfg.rel_tol = 1e-8;
    cfg.max_iters = 1000;
    const FabResult result = fab_fit(data.x, cfg);
    hits += result.model.components() == 2 ? 1 : 0;
  }
  CHECK(hits >= 9);
}

TEST_CASE("selected k is weakly non-increasing in the prune threshold") {
  const GeneratedData data = two_cluster_data(31, 100);
  int previous = 1 << 20;
  for (double threshold : {0.0, 1.0, 3.0, 8.0, 20.0}) {
    FabConfig cfg;
    cfg.k_init = 8;
    cfg.d = 1.0;
    cfg.seed = 31;
    cfg.prune_threshold = threshold;
    const FabResult result = fab_fit(data.x, cfg);
    CHECK(result.model.components() <= previous);
    previous = result.model.components();
  }
}

TEST_CASE("permuting initial components permutes the fit, not the outcome") {
  const GeneratedData data = two_cluster_data(13, 60);
  FabConfig cfg;
  cfg.k_init = 5;
  cfg.d = 1.0;
  cfg.seed = 13;

  const Matrix q0 = initial_responsibilities(data.x, cfg);
  Matrix permuted(q0.rows(), q0.cols());
  const int perm[] = {3, 0, 4, 2, 1};
  for (int c = 0; c < 5; ++c) permuted.col(c) = q0.col(perm[c]);

  const FabResult a = fab_fit_from(data.x, cfg, q0);
  const FabResult b = fab_fit_from(data.x, cfg, permuted);

  CHECK(a.model.components() == b.model.components());
  const double scale = std::max(1.0, std::abs(a.trace.records.back().objective));
  CHECK(std::abs(a.trace.records.back().objective -
                 b.trace.records.back().objective) <= 1e-8 * scale);

  std::vector<double> wa(a.model.weights.begin(), a.model.weights.end());
  std::vector<double> wb(b.model.weights.begin(), b.model.weights.end());
  std::sort(wa.begin(), wa.end());
  std::sort(wb.begin(), wb.end());
  for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa[i] == Approx(wb[i]).epsilon(1e-8));
}

TEST_CASE("fab_fit is deterministic for a fixed seed") {
  const GeneratedData data = two_cluster_data(17, 40);
  FabConfig cfg;
  cfg.k_init = 6;
  cfg.d = 1.0;
  cfg.seed = 99;
  const FabResult a = fab_fit(data.x, cfg);
  const FabResult b = fab_fit(data.x, cfg);
  CHECK(a.model.components() == b.model.components());
  CHECK((a.model.means - b.model.means).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.model.weights - b.model.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.trace.records.back().objective == b.trace.records.back().objective);
}

TEST_CASE("fab_fit validates its inputs") {
  Matrix x(2, 1);
  x << 0.0, 1.0;
  FabConfig cfg;
  cfg.k_init = 3;  // more components than rows
  CHECK_THROWS_AS(fab_fit(x, cfg), std::invalid_argument);
  Matrix bad(1, 1);
  bad << std::numeric_limits<double>::quiet_NaN();
  cfg.k_init = 1;
  CHECK_THROWS_AS(fab_fit(bad, cfg), std::invalid_argument);
}

TEST_CASE("trace records pruned component ids") {
  const GeneratedData data = two_cluster_data(41, 120);
  FabConfig cfg;
  cfg.k_init = 9;
  cfg.d = 2.0;
  cfg.seed = 41;
  const FabResult result = fab_fit(data.x, cfg);

  std::vector<int> removed;
  for (const auto& rec : result.trace.records) {
    removed.insert(removed.end(), rec.pruned.begin(), rec.pruned.end());
  }
  CHECK(static_cast<int>(removed.size()) + result.model.components() == 9);
  std::vector<int> all = removed;
  all.insert(all.end(), result.component_ids.begin(), result.component_ids.end());
  std::sort(all.begin(), all.end());
  for (int c = 0; c < 9; ++c) CHECK(all[static_cast<std::size_t>(c)] == c + 1);
}
