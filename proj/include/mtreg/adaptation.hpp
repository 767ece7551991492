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
// Applying a learned prior to a new task: score with the prior mean alone
// (zero training data), refit a task model under the prior as trials
// accumulate, and pick the trade-off parameter by cross-validation.

#ifndef MTREG_ADAPTATION_HPP
#define MTREG_ADAPTATION_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/multitask.hpp"
#include "mtreg/prior.hpp"

namespace mtreg {

/// Ties (score exactly zero) resolve to +1.
inline int sign_label(double score) { return score < 0.0 ? -1 : 1; }

struct Prediction {
  double score = 0.0;
  int label = 1;
};

inline Prediction predict_flat(const Eigen::MatrixXd& features,
                               const Eigen::VectorXd& w) {
  const double score = flatten_trial(features).dot(w);
  return {score, sign_label(score)};
}

/// Prior-mean score for an unseen task, flat rule.
inline Prediction predict_zero_training(const Trial& trial,
                                        const MtlFit& fit) {
  return predict_flat(trial.features, fit.prior.mean);
}

/// Prior-mean score for an unseen task, bilinear rule.
inline Prediction predict_zero_training(const Trial& trial, const FdFit& fit) {
  const double score = fd_predict_raw(
      trial.features, FdModel{fit.prior_alpha.mean, fit.prior_w.mean});
  return {score, sign_label(score)};
}

/// Single-task solve under a learned prior. With no trials the result is
/// exactly the prior mean.
inline FlatModel adapt_flat(const TaskDataset& train,
                            const GaussianPrior& prior, double lambda) {
  auto [X, y] = flatten_trials(train);
  return update_task_weights(X, y, prior, lambda);
}

/// Bilinear single-task solve under learned priors, iterated from the prior
/// means until the linked factors converge.
inline FdModel adapt_fd(const TaskDataset& train, const GaussianPrior& prior_w,
                        const GaussianPrior& prior_alpha, double lambda,
                        const TrainConfig& config) {
  TrainConfig adapted = config;
  adapted.lambda = lambda;
  FdModel start{prior_alpha.mean, prior_w.mean};
  return fd_inner_loop(train, start, prior_w, prior_alpha, adapted).model;
}

enum class ModelKind { flat, fd };

/// Priors handed to cross-validation; absent entries mean the standard
/// (zero-mean, identity) prior, in which case the bilinear path starts from
/// an all-ones alpha instead of the zero prior mean.
struct CvPriors {
  std::optional<GaussianPrior> flat;
  std::optional<GaussianPrior> w;
  std::optional<GaussianPrior> alpha;
};

namespace detail {

/// Deterministic stratified fold ids: trials are visited class by class in
/// on-disk order and dealt round-robin onto the k folds with a single
/// running counter, so folds are balanced globally and per class without
/// consuming randomness.
inline std::vector<int> stratified_folds(const TaskDataset& task, int k) {
  std::vector<int> fold(task.trials.size(), 0);
  int counter = 0;
  for (int target : {1, -1}) {
    for (std::size_t i = 0; i < task.trials.size(); ++i) {
      if (task.trials[i].label == target) fold[i] = counter++ % k;
    }
  }
  return fold;
}

inline double fold_accuracy(const TaskDataset& train, const TaskDataset& test,
                            double lambda, ModelKind kind,
                            const CvPriors& priors,
                            const TrainConfig& config) {
  long correct = 0;
  if (kind == ModelKind::flat) {
    const GaussianPrior prior =
        priors.flat ? *priors.flat : GaussianPrior::standard(train.dim());
    FlatModel model = adapt_flat(train, prior, lambda);
    for (const Trial& trial : test.trials)
      if (predict_flat(trial.features, model.w).label == trial.label)
        ++correct;
  } else {
    const GaussianPrior prior_w =
        priors.w ? *priors.w : GaussianPrior::standard(train.n_bands);
    const GaussianPrior prior_alpha =
        priors.alpha ? *priors.alpha
                     : GaussianPrior::standard(train.n_electrodes);
    FdModel model;
    if (priors.w || priors.alpha) {
      model = adapt_fd(train, prior_w, prior_alpha, lambda, config);
    } else {
      TrainConfig ridge_config = config;
      ridge_config.lambda = lambda;
      FdModel start{Eigen::VectorXd::Ones(train.n_electrodes),
                    Eigen::VectorXd::Zero(train.n_bands)};
      model = fd_inner_loop(train, start, prior_w, prior_alpha, ridge_config)
                  .model;
    }
    for (const Trial& trial : test.trials)
      if (sign_label(fd_predict_raw(trial.features, model)) == trial.label)
        ++correct;
  }
  return test.trials.empty()
             ? 0.0
             : static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace detail

/// Picks the grid value with the best mean fold accuracy over deterministic
/// stratified k-folds; ties resolve toward the larger value (leaning on the
/// prior when the evidence is equivocal). Throws when some training fold
/// would miss a class entirely.
inline double cross_validate_lambda(const TaskDataset& train,
                                    const std::vector<double>& grid, int k,
                                    ModelKind kind, const CvPriors& priors,
                                    const TrainConfig& config) {
  require(!grid.empty(), "cross-validation: empty grid");
  for (double lambda : grid)
    require(lambda > 0.0, "cross-validation: grid values must be positive");
  require(k >= 1 && k <= train.size(),
          "cross-validation: fold count must be in [1, n]");
  if (grid.size() == 1) return grid.front();

  const std::vector<int> fold = detail::stratified_folds(train, k);
  std::vector<TaskDataset> fold_train(k, TaskDataset{train.task_id,
                                                     train.n_electrodes,
                                                     train.n_bands,
                                                     {},
                                                     train.electrode_names});
  std::vector<TaskDataset> fold_test = fold_train;
  for (std::size_t i = 0; i < train.trials.size(); ++i) {
    for (int j = 0; j < k; ++j)
      (fold[i] == j ? fold_test : fold_train)[static_cast<std::size_t>(j)]
          .trials.push_back(train.trials[i]);
  }
  for (int j = 0; j < k; ++j) {
    const auto& t = fold_train[static_cast<std::size_t>(j)];
    bool has_pos = false, has_neg = false;
    for (const Trial& trial : t.trials)
      (trial.label > 0 ? has_pos : has_neg) = true;
    if (!(has_pos && has_neg) || fold_test[static_cast<std::size_t>(j)].trials.empty()) {
      throw validation_error(
          "cross-validation: fold " + std::to_string(j) +
          " infeasible (training folds need at least one trial per class)");
    }
  }

  std::vector<double> mean_accuracy(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t g) {
    double total = 0.0;
    for (int j = 0; j < k; ++j)
      total += detail::fold_accuracy(fold_train[static_cast<std::size_t>(j)],
                                     fold_test[static_cast<std::size_t>(j)],
                                     grid[g], kind, priors, config);
    mean_accuracy[g] = total / static_cast<double>(k);
  });

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (mean_accuracy[g] > mean_accuracy[best] ||
        (mean_accuracy[g] == mean_accuracy[best] && grid[g] > grid[best]))
      best = g;
  }
  return grid[best];
}

/// Pooled-collection overload: folds run over the concatenated trials.
inline double cross_validate_lambda(const TaskCollection& collection,
                                    const std::vector<double>& grid, int k,
                                    ModelKind kind, const CvPriors& priors,
                                    const TrainConfig& config) {
  return cross_validate_lambda(pool_tasks(collection), grid, k, kind, priors,
                               config);
}

/// 13 logarithmically spaced values from 1e-4 to 1e2.
inline std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 13; ++i)
    grid.push_back(std::pow(10.0, -4.0 + 0.5 * static_cast<double>(i)));
  return grid;
}

}  // namespace mtreg

#endif  // MTREG_ADAPTATION_HPP
