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
// Joint training of per-task weight vectors and a shared Gaussian prior in
// the flat d-dimensional feature space. The trainer alternates closed-form
// per-task solves with the prior mean/covariance re-estimation from
// prior.hpp until the parameters stop moving.

#ifndef MTREG_MULTITASK_HPP
#define MTREG_MULTITASK_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/prior.hpp"

namespace mtreg {

struct FlatModel {
  Eigen::VectorXd w;
};

/// Result of joint training.
///
/// objective_trace holds two entries per outer iteration, both evaluated
/// under the covariance in effect during that iteration: the value at the
/// start of the iteration and the value after the weight sweep and mean
/// update. Within each pair the second entry never exceeds the first (each
/// step is an exact minimizer); the covariance rescaling between pairs
/// carries no such guarantee and is deliberately left out of it.
struct MtlFit {
  GaussianPrior prior;
  Eigen::MatrixXd task_weights;  // one row per task
  std::vector<std::string> task_ids;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> factor_covariance(
    const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw solver_error("prior covariance is not positive definite");
  return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

/// Penalized single-task loss:
///   (1/lambda) ||X w - y||^2
///   + 1/2 (w - mean)^T covariance^{-1} (w - mean)
///   + 1/2 log det covariance.
inline double penalized_loss_single(const Eigen::VectorXd& w,
                                    const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y,
                                    const GaussianPrior& prior,
                                    double lambda) {
  require(lambda > 0.0, "loss: lambda must be positive");
  require(X.cols() == w.size() && X.rows() == y.size(),
          "loss: dimension mismatch");
  require(prior.dim() == w.size(), "loss: prior dimension mismatch");
  auto llt = detail::factor_covariance(prior.covariance);
  const Eigen::VectorXd residual = X * w - y;
  const Eigen::VectorXd centered = w - prior.mean;
  const double quad = centered.dot(llt.solve(centered));
  return residual.squaredNorm() / lambda + 0.5 * quad +
         0.5 * detail::log_det_from_llt(llt);
}

/// Gradient of penalized_loss_single in w:
///   (2/lambda) X^T (X w - y) + covariance^{-1} (w - mean).
inline Eigen::VectorXd penalized_loss_gradient(const Eigen::VectorXd& w,
                                               const Eigen::MatrixXd& X,
                                               const Eigen::VectorXd& y,
                                               const GaussianPrior& prior,
                                               double lambda) {
  auto llt = detail::factor_covariance(prior.covariance);
  return (2.0 / lambda) * (X.transpose() * (X * w - y)) +
         llt.solve(w - prior.mean);
}

/// Closed-form minimizer of penalized_loss_single, solved in the form that
/// avoids inverting the covariance:
///   (2 covariance X^T X / lambda + I) w = 2 covariance X^T y / lambda + mean.
/// The 2/lambda factor is the exact gradient weight of the data term in
/// penalized_loss_single; it amounts to relabeling the (cross-validated)
/// trade-off parameter. The system matrix is similar to a symmetric positive
/// definite one, so the LU solve cannot hit a genuinely singular system on
/// valid input.
inline FlatModel update_task_weights(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y,
                                     const GaussianPrior& prior,
                                     double lambda) {
  require(lambda > 0.0, "weight update: lambda must be positive");
  require(X.cols() == prior.dim(), "weight update: dimension mismatch");
  require(X.rows() == y.size(), "weight update: label count mismatch");
  require(X.allFinite() && y.allFinite(), "weight update: non-finite input");
  Eigen::MatrixXd gram = X.transpose() * X;
  Eigen::MatrixXd system = prior.covariance * gram * (2.0 / lambda);
  system.diagonal().array() += 1.0;
  Eigen::VectorXd rhs =
      prior.covariance * (X.transpose() * y) * (2.0 / lambda) + prior.mean;
  Eigen::VectorXd w = system.partialPivLu().solve(rhs);
  if (!w.allFinite())
    throw solver_error("weight update produced non-finite solution");
  return {std::move(w)};
}

/// Algebraically identical update solved in information form,
///   (2 X^T X / lambda + covariance^{-1}) w
///       = 2 X^T y / lambda + covariance^{-1} mean,
/// kept as an independent route for cross-checking the production solve.
inline FlatModel update_task_weights_information_form(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
    const GaussianPrior& prior, double lambda) {
  require(lambda > 0.0, "weight update: lambda must be positive");
  require(X.cols() == prior.dim(), "weight update: dimension mismatch");
  require(X.rows() == y.size(), "weight update: label count mismatch");
  require(X.allFinite() && y.allFinite(), "weight update: non-finite input");
  auto llt = detail::factor_covariance(prior.covariance);
  const Eigen::Index d = prior.dim();
  Eigen::MatrixXd precision =
      llt.solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd system = X.transpose() * X * (2.0 / lambda) + precision;
  Eigen::VectorXd rhs =
      X.transpose() * y * (2.0 / lambda) + llt.solve(prior.mean);
  Eigen::LLT<Eigen::MatrixXd> system_llt(system);
  if (system_llt.info() != Eigen::Success)
    throw solver_error("information-form system not positive definite");
  Eigen::VectorXd w = system_llt.solve(rhs);
  if (!w.allFinite())
    throw solver_error("weight update produced non-finite solution");
  return {std::move(w)};
}

/// Joint objective over all tasks for a given prior: the sum of per-task
/// data terms and prior penalties, with the log-determinant counted once
/// per task.
inline double joint_objective(const std::vector<Eigen::MatrixXd>& designs,
                              const std::vector<Eigen::VectorXd>& labels,
                              const Eigen::MatrixXd& task_weights,
                              const GaussianPrior& prior, double lambda) {
  require(designs.size() == labels.size() &&
              static_cast<Eigen::Index>(designs.size()) == task_weights.rows(),
          "objective: task count mismatch");
  auto llt = detail::factor_covariance(prior.covariance);
  const double log_det = detail::log_det_from_llt(llt);
  double total = 0.0;
  for (std::size_t s = 0; s < designs.size(); ++s) {
    const Eigen::VectorXd w = task_weights.row(static_cast<Eigen::Index>(s));
    const Eigen::VectorXd residual = designs[s] * w - labels[s];
    const Eigen::VectorXd centered = w - prior.mean;
    total += residual.squaredNorm() / lambda +
             0.5 * centered.dot(llt.solve(centered)) + 0.5 * log_det;
  }
  return total;
}

/// Joint trainer. Starts from a standard-normal prior, then alternates a
/// parallel sweep of per-task weight solves with the prior mean and
/// covariance updates until the largest relative parameter change drops
/// below outer_tol or the iteration cap is hit. A degenerate weight scatter
/// leaves the covariance at its previous value (identity at first).
inline MtlFit train_multitask(const TaskCollection& collection,
                              const TrainConfig& config) {
  config.validate();
  validate_collection(collection, /*for_training=*/true);
  const Eigen::Index n_tasks = collection.size();
  const Eigen::Index d = collection.dim();

  std::vector<Eigen::MatrixXd> designs(n_tasks);
  std::vector<Eigen::VectorXd> labels(n_tasks);
  for (Eigen::Index s = 0; s < n_tasks; ++s) {
    auto [X, y] = flatten_trials(collection.tasks[s]);
    designs[s] = std::move(X);
    labels[s] = std::move(y);
  }

  MtlFit fit;
  fit.prior = GaussianPrior::standard(d);
  fit.task_weights = Eigen::MatrixXd::Zero(n_tasks, d);
  for (const TaskDataset& task : collection.tasks)
    fit.task_ids.push_back(task.task_id);

  for (int iter = 0; iter < config.max_outer_iter; ++iter) {
    const Eigen::MatrixXd previous_weights = fit.task_weights;
    const Eigen::VectorXd previous_mean = fit.prior.mean;
    const Eigen::MatrixXd previous_cov = fit.prior.covariance;

    fit.objective_trace.push_back(joint_objective(
        designs, labels, fit.task_weights, fit.prior, config.lambda));

    parallel_for(static_cast<std::size_t>(n_tasks), [&](std::size_t s) {
      FlatModel model = update_task_weights(designs[s], labels[s], fit.prior,
                                            config.lambda);
      fit.task_weights.row(static_cast<Eigen::Index>(s)) =
          model.w.transpose();
    });
    fit.prior.mean = update_prior_mean(fit.task_weights);

    fit.objective_trace.push_back(joint_objective(
        designs, labels, fit.task_weights, fit.prior, config.lambda));

    try {
      fit.prior.covariance = update_prior_covariance(
          fit.task_weights, fit.prior.mean, config.epsilon);
    } catch (const degenerate_scatter_error&) {
      // keep the previous covariance
    }

    fit.iterations = iter + 1;
    double change = relative_change(fit.prior.mean, previous_mean);
    change = std::max(change,
                      relative_change(fit.prior.covariance, previous_cov));
    for (Eigen::Index s = 0; s < n_tasks; ++s) {
      change = std::max(
          change, relative_change(fit.task_weights.row(s).transpose(),
                                  previous_weights.row(s).transpose()));
    }
    if (change < config.outer_tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace mtreg

#endif  // MTREG_MULTITASK_HPP
