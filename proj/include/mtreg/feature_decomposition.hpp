// Copyright 2026 The mtreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Bilinear (spatial x spectral) decision rules: score(X) = alpha^T X w with
// per-electrode weights alpha and per-band weights w shared across
// electrodes, cutting the parameter count from E*F to E+F. Training
// alternates exact single-factor solves inside each task and re-estimates
// independent Gaussian priors over alpha and w across tasks.

#ifndef MTREG_FEATURE_DECOMPOSITION_HPP
#define MTREG_FEATURE_DECOMPOSITION_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/multitask.hpp"
#include "mtreg/prior.hpp"

namespace mtreg {

struct FdModel {
  Eigen::VectorXd alpha;  // spatial weights, one per electrode
  Eigen::VectorXd w;      // spectral weights, one per band
};

/// Raw bilinear score alpha^T X w.
inline double fd_predict_raw(const Eigen::MatrixXd& features,
                             const FdModel& model) {
  require(features.rows() == model.alpha.size() &&
              features.cols() == model.w.size(),
          "fd score: shape mismatch");
  return model.alpha.dot(features * model.w);
}

/// Collapses each trial onto the spatial weights: row i = alpha^T X_i,
/// giving the (n x F) design the spectral solve runs on.
inline Eigen::MatrixXd collapse_spatial(const TaskDataset& task,
                                        const Eigen::VectorXd& alpha) {
  require(alpha.size() == task.n_electrodes, "collapse: alpha length != E");
  Eigen::MatrixXd collapsed(task.size(), task.n_bands);
  for (Eigen::Index i = 0; i < task.size(); ++i)
    collapsed.row(i) = (task.trials[i].features.transpose() * alpha).transpose();
  return collapsed;
}

/// Collapses each trial onto the spectral weights: column i = X_i w,
/// giving the (E x n) matrix whose transpose the spatial solve runs on.
inline Eigen::MatrixXd collapse_spectral(const TaskDataset& task,
                                         const Eigen::VectorXd& w) {
  require(w.size() == task.n_bands, "collapse: w length != F");
  Eigen::MatrixXd collapsed(task.n_electrodes, task.size());
  for (Eigen::Index i = 0; i < task.size(); ++i)
    collapsed.col(i) = task.trials[i].features * w;
  return collapsed;
}

/// Decomposed single-task loss:
///   (1/lambda) sum_i (alpha^T X_i w - y_i)^2
///   + Omega(w; prior_w) + Omega(alpha; prior_alpha),
/// where each Omega is the Gaussian penalty with its log-determinant term.
inline double fd_task_loss(const TaskDataset& task, const FdModel& model,
                           const GaussianPrior& prior_w,
                           const GaussianPrior& prior_alpha, double lambda) {
  require(lambda > 0.0, "fd loss: lambda must be positive");
  auto llt_w = detail::factor_covariance(prior_w.covariance);
  auto llt_a = detail::factor_covariance(prior_alpha.covariance);
  double data = 0.0;
  for (const Trial& trial : task.trials) {
    const double r = fd_predict_raw(trial.features, model) - trial.label;
    data += r * r;
  }
  const Eigen::VectorXd cw = model.w - prior_w.mean;
  const Eigen::VectorXd ca = model.alpha - prior_alpha.mean;
  return data / lambda + 0.5 * cw.dot(llt_w.solve(cw)) +
         0.5 * detail::log_det_from_llt(llt_w) +
         0.5 * ca.dot(llt_a.solve(ca)) +
         0.5 * detail::log_det_from_llt(llt_a);
}

struct FdInnerResult {
  FdModel model;
  std::vector<double> loss_trace;  // entry value, then one per half-update
  int iterations = 0;
  bool converged = false;
};

/// Alternating per-task solve for fixed priors. Each half-step is the exact
/// minimizer of fd_task_loss over one factor given the other, so the loss
/// trace is non-increasing. The collapsed designs are rebuilt from the most
/// recent factor before every half-step.
///
/// When E == 1 (F == 1) the spatial (spectral) factor is held at its initial
/// value and only the other factor is solved, which makes the bilinear rule
/// coincide with the flat linear one in those shapes.
inline FdInnerResult fd_inner_loop(const TaskDataset& task,
                                   const FdModel& model0,
                                   const GaussianPrior& prior_w,
                                   const GaussianPrior& prior_alpha,
                                   const TrainConfig& config) {
  config.validate();
  require(model0.alpha.size() == task.n_electrodes &&
              model0.w.size() == task.n_bands,
          "fd inner loop: model shape mismatch");
  require(prior_w.dim() == task.n_bands && prior_alpha.dim() == task.n_electrodes,
          "fd inner loop: prior shape mismatch");
  const Eigen::VectorXd y = [&] {
    Eigen::VectorXd labels(task.size());
    for (Eigen::Index i = 0; i < task.size(); ++i)
      labels(i) = static_cast<double>(task.trials[i].label);
    return labels;
  }();

  bool solve_alpha = task.n_electrodes > 1;
  bool solve_w = task.n_bands > 1;
  if (!solve_alpha && !solve_w) solve_w = true;

  FdInnerResult result;
  result.model = model0;
  result.loss_trace.push_back(
      fd_task_loss(task, result.model, prior_w, prior_alpha, config.lambda));

  for (int iter = 0; iter < config.max_inner_iter; ++iter) {
    const FdModel previous = result.model;
    if (solve_w) {
      Eigen::MatrixXd design = collapse_spatial(task, result.model.alpha);
      result.model.w =
          update_task_weights(design, y, prior_w, config.lambda).w;
      result.loss_trace.push_back(fd_task_loss(task, result.model, prior_w,
                                               prior_alpha, config.lambda));
    }
    if (solve_alpha) {
      Eigen::MatrixXd design =
          collapse_spectral(task, result.model.w).transpose();
      result.model.alpha =
          update_task_weights(design, y, prior_alpha, config.lambda).w;
      result.loss_trace.push_back(fd_task_loss(task, result.model, prior_w,
                                               prior_alpha, config.lambda));
    }
    result.iterations = iter + 1;
    const double change =
        std::max(relative_change(result.model.w, previous.w),
                 relative_change(result.model.alpha, previous.alpha));
    if (change < config.inner_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Decomposed joint objective over all tasks under the current priors.
inline double fd_joint_objective(const TaskCollection& collection,
                                 const std::vector<FdModel>& models,
                                 const GaussianPrior& prior_w,
                                 const GaussianPrior& prior_alpha,
                                 double lambda) {
  require(models.size() == collection.tasks.size(),
          "fd objective: model count mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < models.size(); ++s)
    total += fd_task_loss(collection.tasks[s], models[s], prior_w,
                          prior_alpha, lambda);
  return total;
}

/// Result of decomposed joint training. objective_trace follows the same
/// two-entries-per-outer-iteration contract as MtlFit (values before and
/// after the inner sweep plus mean updates, under that iteration's
/// covariances). inner_loss_traces keeps every inner loop's loss trace,
/// ordered by outer iteration then task.
struct FdFit {
  GaussianPrior prior_w;      // dimension F
  GaussianPrior prior_alpha;  // dimension E
  std::vector<FdModel> task_models;
  std::vector<std::string> task_ids;
  std::vector<double> objective_trace;
  std::vector<std::vector<double>> inner_loss_traces;
  int iterations = 0;
  bool converged = false;
};

/// Pooled spatial initialization: concatenates every task into one dataset,
/// runs the alternating solve with standard priors from an all-ones alpha,
/// and returns the resulting spatial weights. Tolerances and iteration caps
/// come from the supplied config.
inline Eigen::VectorXd fd_ridge_init(const TaskCollection& collection,
                                     double lambda,
                                     const TrainConfig& config) {
  require(lambda > 0.0, "ridge init: lambda must be positive");
  TaskDataset pooled = pool_tasks(collection);
  require(!pooled.trials.empty(), "ridge init: empty collection");
  FdModel start{Eigen::VectorXd::Ones(pooled.n_electrodes),
                Eigen::VectorXd::Zero(pooled.n_bands)};
  TrainConfig pooled_config = config;
  pooled_config.lambda = lambda;
  GaussianPrior prior_w = GaussianPrior::standard(pooled.n_bands);
  GaussianPrior prior_alpha = GaussianPrior::standard(pooled.n_electrodes);
  return fd_inner_loop(pooled, start, prior_w, prior_alpha, pooled_config)
      .model.alpha;
}

/// Joint decomposed trainer. Initialization follows config.init_mode:
/// uninformative starts every task at an all-ones alpha; ridge_init starts
/// from the pooled spatial weights of fd_ridge_init. Either way both priors
/// start standard-normal, the per-task inner loops run before any prior
/// update, and the mean/covariance re-estimation is applied independently
/// to the spectral and spatial weight stacks (with the same degenerate-
/// scatter fallback as the flat trainer, per prior).
inline FdFit train_multitask_fd(const TaskCollection& collection,
                                const TrainConfig& config) {
  config.validate();
  validate_collection(collection, /*for_training=*/true);
  const Eigen::Index n_tasks = collection.size();
  const Eigen::Index n_electrodes = collection.n_electrodes();
  const Eigen::Index n_bands = collection.n_bands();

  FdFit fit;
  fit.prior_w = GaussianPrior::standard(n_bands);
  fit.prior_alpha = GaussianPrior::standard(n_electrodes);
  Eigen::VectorXd alpha0 = Eigen::VectorXd::Ones(n_electrodes);
  if (config.init_mode == InitMode::ridge_init)
    alpha0 = fd_ridge_init(collection, config.lambda, config);
  fit.task_models.assign(static_cast<std::size_t>(n_tasks),
                         FdModel{alpha0, Eigen::VectorXd::Zero(n_bands)});
  for (const TaskDataset& task : collection.tasks)
    fit.task_ids.push_back(task.task_id);

  Eigen::MatrixXd w_stack(n_tasks, n_bands);
  Eigen::MatrixXd alpha_stack(n_tasks, n_electrodes);

  for (int iter = 0; iter < config.max_outer_iter; ++iter) {
    const std::vector<FdModel> previous_models = fit.task_models;
    const GaussianPrior previous_w = fit.prior_w;
    const GaussianPrior previous_alpha = fit.prior_alpha;

    fit.objective_trace.push_back(
        fd_joint_objective(collection, fit.task_models, fit.prior_w,
                           fit.prior_alpha, config.lambda));

    std::vector<std::vector<double>> traces(
        static_cast<std::size_t>(n_tasks));
    parallel_for(static_cast<std::size_t>(n_tasks), [&](std::size_t s) {
      FdInnerResult inner =
          fd_inner_loop(collection.tasks[s], fit.task_models[s], fit.prior_w,
                        fit.prior_alpha, config);
      fit.task_models[s] = std::move(inner.model);
      traces[s] = std::move(inner.loss_trace);
    });
    for (auto& trace : traces)
      fit.inner_loss_traces.push_back(std::move(trace));

    for (Eigen::Index s = 0; s < n_tasks; ++s) {
      w_stack.row(s) =
          fit.task_models[static_cast<std::size_t>(s)].w.transpose();
      alpha_stack.row(s) =
          fit.task_models[static_cast<std::size_t>(s)].alpha.transpose();
    }
    fit.prior_w.mean = update_prior_mean(w_stack);
    fit.prior_alpha.mean = update_prior_mean(alpha_stack);

    fit.objective_trace.push_back(
        fd_joint_objective(collection, fit.task_models, fit.prior_w,
                           fit.prior_alpha, config.lambda));

    try {
      fit.prior_w.covariance =
          update_prior_covariance(w_stack, fit.prior_w.mean, config.epsilon);
    } catch (const degenerate_scatter_error&) {
    }
    try {
      fit.prior_alpha.covariance = update_prior_covariance(
          alpha_stack, fit.prior_alpha.mean, config.epsilon);
    } catch (const degenerate_scatter_error&) {
    }

    fit.iterations = iter + 1;
    double change = relative_change(fit.prior_w.mean, previous_w.mean);
    change = std::max(change, relative_change(fit.prior_w.covariance,
                                              previous_w.covariance));
    change = std::max(change, relative_change(fit.prior_alpha.mean,
                                              previous_alpha.mean));
    change = std::max(change, relative_change(fit.prior_alpha.covariance,
                                              previous_alpha.covariance));
    for (std::size_t s = 0; s < fit.task_models.size(); ++s) {
      change = std::max(change, relative_change(fit.task_models[s].w,
                                                previous_models[s].w));
      change = std::max(change, relative_change(fit.task_models[s].alpha,
                                                previous_models[s].alpha));
    }
    if (change < config.outer_tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

/// Canonical representative under the scale symmetry
/// (C alpha, w / C) -> same scores: alpha scaled to unit norm, w absorbing
/// the factor, overall sign chosen so the largest-magnitude alpha entry is
/// positive. A zero alpha is returned unchanged with factor 1.
struct FdCanonical {
  Eigen::VectorXd alpha;
  Eigen::VectorXd w;
  double alpha_norm = 1.0;
  double sign = 1.0;
};

inline FdCanonical canonicalize(const FdModel& model) {
  FdCanonical canonical;
  const double norm = model.alpha.norm();
  if (norm == 0.0) {
    canonical.alpha = model.alpha;
    canonical.w = model.w;
    return canonical;
  }
  Eigen::Index top = 0;
  model.alpha.cwiseAbs().maxCoeff(&top);
  canonical.sign = model.alpha(top) < 0.0 ? -1.0 : 1.0;
  canonical.alpha_norm = norm;
  canonical.alpha = canonical.sign * model.alpha / norm;
  canonical.w = canonical.sign * norm * model.w;
  return canonical;
}

}  // namespace mtreg

#endif  // MTREG_FEATURE_DECOMPOSITION_HPP
