// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fablab/rng.hpp"

namespace fablab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// Bandwidth of the kmeans-style soft init, in units of the mean per-feature
// data variance. Wide on purpose; see initial_responsibilities.
constexpr double kKMeansStyleBandwidthScale = 8.0;

double neg_inf() { return -std::numeric_limits<double>::infinity(); }

}  // namespace

void validate_dataset(const Matrix& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw std::invalid_argument("dataset: need at least one row and one column");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("dataset: all entries must be finite");
  }
}

double component_log_pdf(const Eigen::Ref<const Vector>& x,
                         const Eigen::Ref<const Vector>& mean,
                         const Eigen::Ref<const Vector>& variance) {
  if ((variance.array() <= 0.0).any()) {
    throw std::invalid_argument("component_log_pdf: variances must be positive");
  }
  const auto diff = (x - mean).array();
  return -0.5 * ((kLog2Pi + variance.array().log()).sum() +
                 (diff.square() / variance.array()).sum());
}

Matrix log_pdf_matrix(const Matrix& x, const GmmModel& model) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = model.components();
  Matrix out(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::ArrayXd var = model.variances.row(c).transpose().array();
    const double log_det = (kLog2Pi + var.log()).sum();
    const Matrix diff = x.rowwise() - model.means.row(c);
    const Vector quad =
        (diff.array().square().matrix() * var.inverse().matrix().asDiagonal())
            .rowwise()
            .sum();
    out.col(c) = -0.5 * (quad.array() + log_det).matrix();
  }
  return out;
}

Vector variance_floor(const Matrix& x, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("variance_floor: scale must be > 0");
  }
  validate_dataset(x);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::RowVectorXd var =
      (x.rowwise() - mean).array().square().colwise().mean().matrix();
  Vector floor = scale * var.transpose();
  for (Eigen::Index j = 0; j < floor.size(); ++j) {
    if (floor(j) <= 0.0) floor(j) = scale;
  }
  return floor;
}

GmmModel mle_fit_given_assignment(const Matrix& x, const Assignment& z,
                                  const Vector& var_floor) {
  validate_dataset(x);
  validate(z);
  if (z.n() != x.rows()) {
    throw std::invalid_argument("mle_fit_given_assignment: label count != rows");
  }
  if (var_floor.size() != x.cols()) {
    throw std::invalid_argument("mle_fit_given_assignment: floor size != cols");
  }
  const CountVector counts = assignment_counts(z);
  const Eigen::Index d = x.cols();
  const double n = static_cast<double>(x.rows());

  int live = 0;
  for (int c : counts) live += c > 0 ? 1 : 0;

  GmmModel model;
  model.weights.resize(live);
  model.means.resize(live, d);
  model.variances.resize(live, d);

  int out = 0;
  for (int slot = 0; slot < z.k_slots; ++slot) {
    const int c = counts[static_cast<std::size_t>(slot)];
    if (c == 0) continue;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (z.labels[static_cast<std::size_t>(i)] == slot + 1) mean += x.row(i);
    }
    mean /= static_cast<double>(c);
    Eigen::RowVectorXd ssd = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (z.labels[static_cast<std::size_t>(i)] == slot + 1) {
        ssd += (x.row(i) - mean).array().square().matrix();
      }
    }
    model.weights(out) = static_cast<double>(c) / n;
    model.means.row(out) = mean;
    model.variances.row(out) =
        (ssd / static_cast<double>(c)).cwiseMax(var_floor.transpose());
    ++out;
  }
  return model;
}

EStep fab_e_step(const Matrix& x, const GmmModel& model, double d,
                 const Vector& prev_soft_counts) {
  if (prev_soft_counts.size() != model.components()) {
    throw std::invalid_argument("fab_e_step: soft count size != components");
  }
  if (!(d >= 0.0)) throw std::invalid_argument("fab_e_step: d must be >= 0");

  Matrix logq = log_pdf_matrix(x, model);
  Eigen::RowVectorXd offset = model.weights.array().log().matrix().transpose();
  if (d > 0.0) {
    for (Eigen::Index c = 0; c < model.components(); ++c) {
      offset(c) += prev_soft_counts(c) > 0.0 ? -d / prev_soft_counts(c) : neg_inf();
    }
  }
  logq.rowwise() += offset;

  const Vector row_max = logq.rowwise().maxCoeff();
  Matrix q = (logq.colwise() - row_max).array().exp().matrix();
  const Vector row_sum = q.rowwise().sum();
  q.array().colwise() /= row_sum.array();

  EStep result;
  result.soft_counts = q.colwise().sum().transpose();
  result.responsibilities = std::move(q);
  return result;
}

GmmModel fab_m_step(const Matrix& x, const Matrix& q, const Vector& var_floor) {
  if (q.rows() != x.rows()) {
    throw std::invalid_argument("fab_m_step: responsibility rows != data rows");
  }
  const Eigen::Index k = q.cols();
  const Eigen::Index d = x.cols();
  const Vector counts = q.colwise().sum().transpose();

  GmmModel model;
  model.weights = counts / static_cast<double>(x.rows());
  model.means = Matrix::Zero(k, d);
  model.variances = Matrix::Zero(k, d);

  const Matrix weighted_sum = q.transpose() * x;                       // k x D
  const Matrix weighted_sq = q.transpose() * x.array().square().matrix();
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts(c) > 0.0) {
      model.means.row(c) = weighted_sum.row(c) / counts(c);
      model.variances.row(c) =
          (weighted_sq.row(c) / counts(c) - model.means.row(c).array().square().matrix())
              .cwiseMax(var_floor.transpose());
    } else {
      model.variances.row(c) = var_floor.transpose();
    }
  }
  return model;
}

double fab_objective(const Matrix& x, const Matrix& q, const GmmModel& model,
                     double d) {
  Matrix scores = log_pdf_matrix(x, model);
  scores.rowwise() += model.weights.array().log().matrix().transpose();

  double expected = 0.0;
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const double p = q(i, c);
      if (p > 0.0) {
        expected += p * scores(i, c);
        entropy -= p * std::log(p);
      }
    }
  }

  const Vector counts = q.colwise().sum().transpose();
  double penalty = 0.0;
  for (Eigen::Index c = 0; c < counts.size(); ++c) {
    if (counts(c) > 0.0) penalty += std::log(counts(c));
  }
  return expected - d * penalty + entropy;
}

double FabConfig::effective_prune_threshold() const {
  return prune_threshold < 0.0 ? std::max(d, 1.0) : prune_threshold;
}

Matrix initial_responsibilities(const Matrix& x, const FabConfig& cfg) {
  validate_dataset(x);
  if (cfg.k_init < 1) throw std::invalid_argument("fab: k_init must be >= 1");
  if (cfg.k_init > x.rows()) {
    throw std::invalid_argument("fab: k_init must not exceed the number of rows");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index k = cfg.k_init;
  Rng rng(cfg.seed);
  Matrix q(n, k);

  if (cfg.init == InitMethod::RandomResponsibilities) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) {
        q(i, c) = -std::log(1.0 - rng.uniform01());  // flat Dirichlet via Exp(1)
        sum += q(i, c);
      }
      q.row(i) /= sum;
    }
    return q;
  }

  // KMeansStyle: centers drawn from the data with distance-squared weighting
  // (the kmeans++ seeding rule), then soft assignments at a wide bandwidth.
  // The softness matters: components start gently tilted toward distinct
  // regions, which is enough for EM to separate them, while near-duplicate
  // components stay coupled so the shrinkage can starve the extras instead
  // of letting each harden onto a slice of one cluster.
  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(
      rng.uniform_int(0, static_cast<int>(n) - 1)));
  Vector dist2 = (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (centers.size() < static_cast<std::size_t>(k)) {
    Eigen::Index pick = 0;
    const double total = dist2.sum();
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.uniform_int(0, static_cast<int>(n) - 1));
    } else {
      double u = rng.uniform01() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= dist2(i);
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
    dist2 = dist2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double feature_var =
      (x.rowwise() - mean).array().square().colwise().mean().mean();
  const double bandwidth = kKMeansStyleBandwidthScale * std::max(feature_var, 1e-12);
  Matrix logq(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    logq.col(c) =
        -(x.rowwise() - x.row(centers[static_cast<std::size_t>(c)]))
             .rowwise()
             .squaredNorm() /
        (2.0 * bandwidth);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd row =
        (logq.row(i).array() - logq.row(i).maxCoeff()).exp().matrix();
    q.row(i) = row / row.sum();
  }
  return q;
}

FabResult fab_fit_from(const Matrix& x, const FabConfig& cfg, Matrix q0) {
  validate_dataset(x);
  if (q0.rows() != x.rows() || q0.cols() < 1) {
    throw std::invalid_argument("fab_fit_from: bad starting responsibilities");
  }
  const Vector floor = variance_floor(x, cfg.var_floor_scale);
  const double threshold = cfg.effective_prune_threshold();

  Matrix q = std::move(q0);
  std::vector<int> ids(static_cast<std::size_t>(q.cols()));
  for (std::size_t c = 0; c < ids.size(); ++c) ids[c] = static_cast<int>(c) + 1;

  GmmModel model = fab_m_step(x, q, floor);
  Vector counts = q.colwise().sum().transpose();
  double objective = fab_objective(x, q, model, cfg.d);

  FabResult result;
  result.trace.records.push_back(
      {0, objective, static_cast<int>(q.cols()), {}});

  int it = 1;
  for (; it <= cfg.max_iters; ++it) {
    EStep step = fab_e_step(x, model, cfg.d, counts);
    q = std::move(step.responsibilities);
    counts = std::move(step.soft_counts);

    std::vector<int> keep;
    std::vector<int> pruned;
    Eigen::Index largest = 0;
    counts.maxCoeff(&largest);
    for (Eigen::Index c = 0; c < counts.size(); ++c) {
      // The largest component always survives so the model stays nonempty.
      if (counts(c) < threshold && c != largest) {
        pruned.push_back(ids[static_cast<std::size_t>(c)]);
      } else {
        keep.push_back(static_cast<int>(c));
      }
    }
    if (!pruned.empty()) {
      Matrix kept(q.rows(), static_cast<Eigen::Index>(keep.size()));
      std::vector<int> kept_ids;
      kept_ids.reserve(keep.size());
      for (std::size_t c = 0; c < keep.size(); ++c) {
        kept.col(static_cast<Eigen::Index>(c)) = q.col(keep[c]);
        kept_ids.push_back(ids[static_cast<std::size_t>(keep[c])]);
      }
      q = std::move(kept);
      ids = std::move(kept_ids);
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const double s = q.row(i).sum();
        if (s > 0.0) {
          q.row(i) /= s;
        } else {
          q.row(i).setConstant(1.0 / static_cast<double>(q.cols()));
        }
      }
      counts = q.colwise().sum().transpose();
    }

    model = fab_m_step(x, q, floor);
    const double next = fab_objective(x, q, model, cfg.d);
    result.trace.records.push_back(
        {it, next, static_cast<int>(q.cols()), pruned});

    const bool small_change =
        std::abs(next - objective) <= cfg.rel_tol * std::max(1.0, std::abs(objective));
    objective = next;
    if (pruned.empty() && small_change) {
      result.trace.converged = true;
      break;
    }
  }

  result.trace.iterations = static_cast<int>(result.trace.records.size()) - 1;
  result.model = std::move(model);
  result.responsibilities = std::move(q);
  result.component_ids = std::move(ids);
  return result;
}

FabResult fab_fit(const Matrix& x, const FabConfig& cfg) {
  return fab_fit_from(x, cfg, initial_responsibilities(x, cfg));
}

}  // namespace fablab
