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
// Shared Gaussian prior over weight vectors and its two re-estimation steps:
// the across-task mean, and the trace-normalized weight scatter plus a small
// ridge. Both trainers (flat and decomposed) reuse these.

#ifndef MTREG_PRIOR_HPP
#define MTREG_PRIOR_HPP

#include <string>

#include <Eigen/Dense>

#include "mtreg/common.hpp"

namespace mtreg {

struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  Eigen::Index dim() const { return mean.size(); }

  /// Zero mean, identity covariance.
  static GaussianPrior standard(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim)};
  }

  void validate() const {
    require(mean.size() > 0, "prior: empty mean");
    require(covariance.rows() == mean.size() &&
                covariance.cols() == mean.size(),
            "prior: covariance shape does not match mean");
    require(mean.allFinite() && covariance.allFinite(),
            "prior: non-finite entry");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    const double asym =
        (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-10 * scale, "prior: covariance not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    require(llt.info() == Eigen::Success,
            "prior: covariance not positive definite");
  }
};

/// Across-task mean of the stacked weight rows, accumulated in a fixed
/// sequential order so parallel trainers stay bitwise reproducible.
inline Eigen::VectorXd update_prior_mean(const Eigen::MatrixXd& task_weights) {
  const Eigen::Index n_tasks = task_weights.rows();
  require(n_tasks >= 1, "prior mean update: no task weights");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(task_weights.cols());
  for (Eigen::Index s = 0; s < n_tasks; ++s)
    sum += task_weights.row(s).transpose();
  return sum / static_cast<double>(n_tasks);
}

/// Trace-normalized residual scatter plus epsilon on the diagonal:
///   sum_s (w_s - mean)(w_s - mean)^T / tr(...) + epsilon I.
/// The result is symmetric, has trace 1 + epsilon*d, and eigenvalues no
/// smaller than epsilon. Throws degenerate_scatter_error when the scatter
/// trace is zero (single task or identical weights); callers fall back to
/// the previous covariance.
inline Eigen::MatrixXd update_prior_covariance(
    const Eigen::MatrixXd& task_weights, const Eigen::VectorXd& mean,
    double epsilon) {
  require(epsilon > 0.0, "covariance update: epsilon must be positive");
  require(task_weights.cols() == mean.size(),
          "covariance update: mean dimension mismatch");
  const Eigen::Index n_tasks = task_weights.rows();
  const Eigen::Index dim = mean.size();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index s = 0; s < n_tasks; ++s) {
    Eigen::VectorXd residual = task_weights.row(s).transpose() - mean;
    scatter.noalias() += residual * residual.transpose();
  }
  const double trace = scatter.trace();
  if (!(trace > 0.0)) {
    throw degenerate_scatter_error(
        "covariance update: zero weight scatter (" +
        std::to_string(n_tasks) + " task(s))");
  }
  scatter /= trace;
  scatter.diagonal().array() += epsilon;
  return scatter;
}

}  // namespace mtreg

#endif  // MTREG_PRIOR_HPP
