// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fablab/rng.hpp"

namespace fablab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

void validate_gen_config(const GenConfig& cfg) {
  if (cfg.k_true < 1 || cfg.n < 1 || cfg.dims < 1) {
    throw std::invalid_argument("GenConfig: k_true, n, dims must be >= 1");
  }
  if (cfg.k_true > cfg.n) {
    throw std::invalid_argument("GenConfig: k_true must not exceed n");
  }
  if (!(cfg.separation > 0.0) || !(cfg.variance > 0.0)) {
    throw std::invalid_argument("GenConfig: separation and variance must be > 0");
  }
}

}  // namespace

GeneratedData generate_gmm_data(const GenConfig& cfg) {
  validate_gen_config(cfg);
  Rng rng(cfg.seed);
  const double sd = std::sqrt(cfg.variance);

  GeneratedData out;
  out.x.resize(cfg.n, cfg.dims);
  out.labels.k_slots = cfg.k_true;
  out.labels.labels.resize(static_cast<std::size_t>(cfg.n));

  for (int i = 0; i < cfg.n; ++i) {
    const int component = rng.uniform_int(0, cfg.k_true - 1);
    out.labels.labels[static_cast<std::size_t>(i)] = component + 1;
    for (int j = 0; j < cfg.dims; ++j) {
      const double mean = j == 0 ? component * cfg.separation * sd : 0.0;
      out.x(i, j) = mean + sd * rng.normal();
    }
  }
  return out;
}

double plugin_log_lik(const Matrix& x, const Partition& b,
                      const Vector& var_floor) {
  if (b.n() != x.rows()) {
    throw std::invalid_argument("plugin_log_lik: partition does not cover the rows");
  }
  if (var_floor.size() != x.cols()) {
    throw std::invalid_argument("plugin_log_lik: floor size != cols");
  }
  double ll = 0.0;
  for (const auto& block : b.blocks) {
    const double m = static_cast<double>(block.size());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double mean = 0.0;
      for (int e : block) mean += x(e - 1, j);
      mean /= m;
      double ssd = 0.0;
      for (int e : block) {
        const double diff = x(e - 1, j) - mean;
        ssd += diff * diff;
      }
      const double v = std::max(ssd / m, var_floor(j));
      ll += -0.5 * (m * (kLog2Pi + std::log(v)) + ssd / v);
    }
  }
  return ll;
}

double partition_log_prior(const PriorSpec& spec, const Partition& b) {
  switch (spec.kind) {
    case PriorKind::Crp:
      return crp_class_log_prob(b, b.block_count());
    case PriorKind::Fic:
      return fic_log_score(b.block_sizes(), spec.dc);
    case PriorKind::Gfic:
      return gfic_log_score(b.block_sizes(), spec.d);
    case PriorKind::Uniform:
      return 0.0;
  }
  throw std::logic_error("partition_log_prior: unreachable");
}

const PosteriorEntry& PosteriorTable::map_entry() const {
  if (entries.empty()) throw std::logic_error("PosteriorTable: empty");
  const PosteriorEntry* best = &entries.front();
  for (const auto& e : entries) {
    if (e.probability > best->probability) best = &e;
  }
  return *best;
}

PosteriorTable posterior_over_partitions(const Matrix& x, const PriorSpec& spec,
                                         int k_max, double var_floor_scale) {
  validate_dataset(x);
  const int n = static_cast<int>(x.rows());
  if (n > 10) {
    throw BudgetError("posterior_over_partitions: N = " + std::to_string(n) +
                      " exceeds the exhaustive limit of 10");
  }
  const Vector floor = variance_floor(x, var_floor_scale);

  PosteriorTable table;
  table.prior = spec;
  PartitionEnumerator e(n, k_max);
  Partition b;
  while (e.next(b)) {
    const double score = plugin_log_lik(x, b, floor) + partition_log_prior(spec, b);
    table.entries.push_back({b, score, 0.0});
  }

  double max_score = -std::numeric_limits<double>::infinity();
  for (const auto& entry : table.entries) max_score = std::max(max_score, entry.log_score);
  double sum = 0.0;
  for (const auto& entry : table.entries) sum += std::exp(entry.log_score - max_score);
  table.log_normalizer = max_score + std::log(sum);
  for (auto& entry : table.entries) {
    entry.probability = std::exp(entry.log_score - table.log_normalizer);
  }
  return table;
}

double total_variation(const PosteriorTable& a, const PosteriorTable& b) {
  if (a.entries.size() != b.entries.size()) {
    throw std::invalid_argument("total_variation: support size mismatch");
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (!(a.entries[i].partition == b.entries[i].partition)) {
      throw std::invalid_argument("total_variation: supports differ");
    }
    l1 += std::abs(a.entries[i].probability - b.entries[i].probability);
  }
  return 0.5 * l1;
}

Matrix replicate_columns(const Matrix& x, int r) {
  if (r < 1) throw std::invalid_argument("replicate_columns: r must be >= 1");
  Matrix out(x.rows(), x.cols() * r);
  for (int copy = 0; copy < r; ++copy) {
    out.block(0, copy * x.cols(), x.rows(), x.cols()) = x;
  }
  return out;
}

std::vector<DominanceRow> dominance_curve(const Matrix& x_base,
                                          const std::vector<int>& replications,
                                          const std::vector<PriorSpec>& specs,
                                          int k_max, double var_floor_scale) {
  validate_dataset(x_base);
  const int base_dims = static_cast<int>(x_base.cols());
  std::vector<DominanceRow> rows;

  for (int r : replications) {
    const Matrix xr = replicate_columns(x_base, r);
    const PosteriorTable likelihood_only =
        posterior_over_partitions(xr, PriorSpec::uniform(), k_max, var_floor_scale);

    for (const PriorSpec& spec : specs) {
      PriorSpec effective = spec;
      if (spec.kind == PriorKind::Fic) {
        effective = PriorSpec::fic(2.0 * base_dims * r);
      }
      const PosteriorTable table =
          spec.kind == PriorKind::Uniform
              ? likelihood_only
              : posterior_over_partitions(xr, effective, k_max, var_floor_scale);
      const PosteriorEntry& map = table.map_entry();
      rows.push_back({r, effective.name(), effective.param_string(),
                      total_variation(table, likelihood_only),
                      map.partition.block_count(), map.partition.to_string()});
    }
  }
  return rows;
}

std::vector<int> hard_labels(const Matrix& q) {
  std::vector<int> labels(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    Eigen::Index best = 0;
    q.row(i).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return labels;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("adjusted_rand_index: label vectors must match");
  }
  const int ka = *std::max_element(a.begin(), a.end());
  const int kb = *std::max_element(b.begin(), b.end());
  Matrix contingency = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    contingency(a[i] - 1, b[i] - 1) += 1.0;
  }
  auto comb2 = [](double m) { return 0.5 * m * (m - 1.0); };

  double sum_cells = 0.0;
  for (Eigen::Index i = 0; i < contingency.rows(); ++i) {
    for (Eigen::Index j = 0; j < contingency.cols(); ++j) {
      sum_cells += comb2(contingency(i, j));
    }
  }
  double sum_rows = 0.0;
  for (Eigen::Index i = 0; i < contingency.rows(); ++i) {
    sum_rows += comb2(contingency.row(i).sum());
  }
  double sum_cols = 0.0;
  for (Eigen::Index j = 0; j < contingency.cols(); ++j) {
    sum_cols += comb2(contingency.col(j).sum());
  }
  const double total = comb2(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;  // single observation
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  const double denom = maximum - expected;
  if (std::abs(denom) < 1e-12) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / denom;
}

std::vector<SelectionRow> selection_sweep(const GenConfig& gen,
                                          const std::vector<double>& d_grid,
                                          const std::vector<std::uint64_t>& seeds,
                                          const FabConfig& base) {
  std::vector<SelectionRow> rows;
  for (double d : d_grid) {
    for (std::uint64_t seed : seeds) {
      SelectionRow row;
      row.d = d;
      row.seed = seed;
      try {
        GenConfig cell_gen = gen;
        cell_gen.seed = seed;
        const GeneratedData data = generate_gmm_data(cell_gen);

        FabConfig cfg = base;
        cfg.d = d;
        cfg.seed = seed;
        const FabResult fit = fab_fit(data.x, cfg);

        row.selected_k = fit.model.components();
        row.objective = fit.trace.records.back().objective;
        row.iterations = fit.trace.iterations;
        row.ari = adjusted_rand_index(hard_labels(fit.responsibilities),
                                      data.labels.labels);
        row.status = "ok";
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace fablab
