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

#ifndef MTREG_BASELINES_HPP
#define MTREG_BASELINES_HPP

#include <Eigen/Dense>

#include "mtreg/data.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/multitask.hpp"
#include "mtreg/prior.hpp"

namespace mtreg {

/// Ridge regression control: the penalized solve with the standard
/// (zero-mean, identity) prior, going through the same solver path as the
/// multitask weight update.
inline FlatModel ridge_train(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double lambda) {
  return update_task_weights(X, y, GaussianPrior::standard(X.cols()), lambda);
}

/// Ridge regression with the bilinear regression function: the alternating
/// per-task solve under standard priors, started from an all-ones alpha.
inline FdModel ridge_fd_train(const TaskDataset& task, double lambda,
                              const TrainConfig& config) {
  TrainConfig ridge_config = config;
  ridge_config.lambda = lambda;
  FdModel start{Eigen::VectorXd::Ones(task.n_electrodes),
                Eigen::VectorXd::Zero(task.n_bands)};
  return fd_inner_loop(task, start, GaussianPrior::standard(task.n_bands),
                       GaussianPrior::standard(task.n_electrodes),
                       ridge_config)
      .model;
}

}  // namespace mtreg

#endif  // MTREG_BASELINES_HPP
