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
// Synthetic multitask collections with planted shared structure. Task rules
// are drawn around a common center, features are standard normal, and labels
// are the sign of the noisy raw response. Task s draws from seed + s, so
// generation is reproducible and parallelizable.

#ifndef MTREG_SYNTHETIC_HPP
#define MTREG_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/rng.hpp"

namespace mtreg {

namespace detail {

inline std::string numbered_task_id(int index, int n_tasks) {
  std::string id = std::to_string(index + 1);
  const std::size_t width = std::to_string(n_tasks).size();
  while (id.size() < std::max<std::size_t>(width, 2)) id.insert(id.begin(), '0');
  return "task_" + id;
}

/// Factor A with A A^T = sigma; exact square roots on exactly diagonal
/// input, eigendecomposition otherwise. Slightly negative eigenvalues from
/// rounding are clamped to zero.
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma) {
  require(sigma.rows() == sigma.cols(), "generator: covariance not square");
  bool diagonal = true;
  for (Eigen::Index i = 0; i < sigma.rows() && diagonal; ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j)
      if (i != j && sigma(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
    for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
      require(sigma(i, i) >= 0.0,
              "generator: covariance has a negative diagonal entry");
      factor(i, i) = std::sqrt(sigma(i, i));
    }
    return factor;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma);
  require(eigen.info() == Eigen::Success,
          "generator: covariance eigendecomposition failed");
  const double scale = std::max(1.0, eigen.eigenvalues().cwiseAbs().maxCoeff());
  require(eigen.eigenvalues().minCoeff() >= -1e-10 * scale,
          "generator: covariance not positive semidefinite");
  Eigen::VectorXd roots = eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eigen.eigenvectors() * roots.asDiagonal() *
         eigen.eigenvectors().transpose();
}

}  // namespace detail

/// Flat planted collection: task rules w_s ~ N(mu_star, sigma_star),
/// standard-normal features stored as 1 x d trials, labels
/// sign(w_s . x + noise). Returns the collection and the true rules, one
/// row per task.
inline std::pair<TaskCollection, Eigen::MatrixXd> generate_flat_collection(
    const Eigen::VectorXd& mu_star, const Eigen::MatrixXd& sigma_star,
    int n_tasks, int n_per_task, double noise_sigma, std::uint64_t seed) {
  require(n_tasks >= 1 && n_per_task >= 1, "generator: counts must be >= 1");
  require(noise_sigma >= 0.0, "generator: negative noise level");
  require(sigma_star.rows() == mu_star.size() &&
              sigma_star.cols() == mu_star.size(),
          "generator: covariance shape does not match mean");
  const Eigen::Index d = mu_star.size();
  const Eigen::MatrixXd factor = detail::psd_factor(sigma_star);

  TaskCollection collection;
  Eigen::MatrixXd true_rules(n_tasks, d);
  for (int s = 0; s < n_tasks; ++s) {
    Rng rng(seed + static_cast<std::uint64_t>(s));
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
    const Eigen::VectorXd rule = mu_star + factor * z;
    true_rules.row(s) = rule.transpose();

    TaskDataset task{detail::numbered_task_id(s, n_tasks), 1, d, {}, {}};
    for (int i = 0; i < n_per_task; ++i) {
      Trial trial;
      trial.features.resize(1, d);
      for (Eigen::Index j = 0; j < d; ++j) trial.features(0, j) = rng.normal();
      const double raw = rule.dot(trial.features.row(0).transpose()) +
                         noise_sigma * rng.normal();
      trial.label = raw < 0.0 ? -1 : 1;
      task.trials.push_back(std::move(trial));
    }
    collection.tasks.push_back(std::move(task));
  }
  return {std::move(collection), std::move(true_rules)};
}

/// Bilinear planted collection: per-task (alpha_s, w_s) are isotropic
/// Gaussian around (alpha_star, w_star), features are standard normal E x F
/// matrices in electrode-major draw order, labels sign(alpha^T X w + noise).
/// A zero spread consumes no random draws, so the E = 1, alpha_spread = 0
/// case reproduces the flat generator stream exactly.
inline std::pair<TaskCollection, std::vector<FdModel>> generate_fd_collection(
    const Eigen::VectorXd& alpha_star, const Eigen::VectorXd& w_star,
    double alpha_spread, double w_spread, int n_tasks, int n_per_task,
    double noise_sigma, std::uint64_t seed) {
  require(n_tasks >= 1 && n_per_task >= 1, "generator: counts must be >= 1");
  require(alpha_spread >= 0.0 && w_spread >= 0.0 && noise_sigma >= 0.0,
          "generator: negative spread or noise");
  const Eigen::Index n_electrodes = alpha_star.size();
  const Eigen::Index n_bands = w_star.size();
  require(n_electrodes >= 1 && n_bands >= 1, "generator: empty rule");

  TaskCollection collection;
  std::vector<FdModel> true_rules;
  for (int s = 0; s < n_tasks; ++s) {
    Rng rng(seed + static_cast<std::uint64_t>(s));
    FdModel rule{alpha_star, w_star};
    if (alpha_spread != 0.0)
      for (Eigen::Index e = 0; e < n_electrodes; ++e)
        rule.alpha(e) += alpha_spread * rng.normal();
    if (w_spread != 0.0)
      for (Eigen::Index f = 0; f < n_bands; ++f)
        rule.w(f) += w_spread * rng.normal();

    TaskDataset task{detail::numbered_task_id(s, n_tasks), n_electrodes,
                     n_bands, {}, {}};
    for (int i = 0; i < n_per_task; ++i) {
      Trial trial;
      trial.features.resize(n_electrodes, n_bands);
      for (Eigen::Index e = 0; e < n_electrodes; ++e)
        for (Eigen::Index f = 0; f < n_bands; ++f)
          trial.features(e, f) = rng.normal();
      const double raw =
          fd_predict_raw(trial.features, rule) + noise_sigma * rng.normal();
      trial.label = raw < 0.0 ? -1 : 1;
      task.trials.push_back(std::move(trial));
    }
    collection.tasks.push_back(std::move(task));
    true_rules.push_back(std::move(rule));
  }
  return {std::move(collection), std::move(true_rules)};
}

/// Desk-scale planted scenario for the flat trainer: 20 dimensions, 10
/// tasks, 100 trials each, label noise 0.5, across-task variation confined
/// to the first two coordinates.
struct FlatScenario {
  Eigen::VectorXd mu_star;
  Eigen::MatrixXd sigma_star;
  int n_tasks = 10;
  int n_per_task = 100;
  double noise_sigma = 0.5;
  std::uint64_t seed = 1;
};

inline FlatScenario default_flat_scenario(Eigen::Index dim = 20) {
  require(dim >= 2, "flat scenario: need at least two dimensions");
  FlatScenario scenario;
  scenario.mu_star = Eigen::VectorXd::Zero(dim);
  scenario.mu_star(0) = 1.2;
  scenario.mu_star(1) = -1.0;
  for (Eigen::Index i = 2; i < dim; ++i)
    scenario.mu_star(i) = (i % 2 == 0 ? 0.2 : -0.2);
  scenario.sigma_star = Eigen::MatrixXd::Zero(dim, dim);
  scenario.sigma_star(0, 0) = 0.5;
  scenario.sigma_star(1, 1) = 0.5;
  return scenario;
}

/// Desk-scale planted scenario for the bilinear trainer: 8 electrodes, 6
/// bands, rank-1 shared structure, mild per-task spreads.
struct FdScenario {
  Eigen::VectorXd alpha_star;
  Eigen::VectorXd w_star;
  double alpha_spread = 0.15;
  double w_spread = 0.15;
  int n_tasks = 10;
  int n_per_task = 300;
  double noise_sigma = 0.5;
  std::uint64_t seed = 1;
};

inline FdScenario default_fd_scenario(Eigen::Index n_electrodes = 8,
                                      Eigen::Index n_bands = 6) {
  require(n_electrodes >= 1 && n_bands >= 1, "fd scenario: empty shape");
  FdScenario scenario;
  scenario.alpha_star = Eigen::VectorXd::Zero(n_electrodes);
  scenario.w_star = Eigen::VectorXd::Zero(n_bands);
  const double alpha_pattern[] = {0.9, -0.7, 0.5, 0.3, -0.2, 0.1, 0.05, -0.4};
  const double w_pattern[] = {1.0, -0.8, 0.5, 0.3, -0.2, 0.1};
  for (Eigen::Index e = 0; e < n_electrodes; ++e)
    scenario.alpha_star(e) = alpha_pattern[e % 8] * (e < 8 ? 1.0 : 0.5);
  for (Eigen::Index f = 0; f < n_bands; ++f)
    scenario.w_star(f) = w_pattern[f % 6] * (f < 6 ? 1.0 : 0.5);
  return scenario;
}

}  // namespace mtreg

#endif  // MTREG_SYNTHETIC_HPP
