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
// Domain types for multitask trial data, plus deterministic splitting and
// the electrode-major flattening used by the flat (non-decomposed) solvers.

#ifndef MTREG_DATA_HPP
#define MTREG_DATA_HPP

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtreg/common.hpp"
#include "mtreg/rng.hpp"

namespace mtreg {

/// One labeled trial: an electrodes x bands feature matrix and a +/-1 label.
struct Trial {
  Eigen::MatrixXd features;
  int label = 1;
};

/// One subject's or session's trials. All trials share the dataset's
/// (n_electrodes, n_bands) shape; the shape is stored explicitly so empty
/// datasets (e.g. a zero-sized training split) keep their dimensions.
struct TaskDataset {
  std::string task_id;
  Eigen::Index n_electrodes = 0;
  Eigen::Index n_bands = 0;  // features per electrode
  std::vector<Trial> trials;
  std::vector<std::string> electrode_names;  // optional; empty or size E

  Eigen::Index dim() const { return n_electrodes * n_bands; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(trials.size()); }
};

/// An ordered set of tasks sharing one feature geometry.
struct TaskCollection {
  std::vector<TaskDataset> tasks;
  std::vector<std::string> band_labels;  // optional; empty or size n_bands

  Eigen::Index size() const { return static_cast<Eigen::Index>(tasks.size()); }
  Eigen::Index n_electrodes() const {
    return tasks.empty() ? 0 : tasks.front().n_electrodes;
  }
  Eigen::Index n_bands() const {
    return tasks.empty() ? 0 : tasks.front().n_bands;
  }
  Eigen::Index dim() const { return n_electrodes() * n_bands(); }
};

enum class InitMode { uninformative, ridge_init };

inline std::string to_string(InitMode mode) {
  return mode == InitMode::uninformative ? "uninformative" : "ridge_init";
}

inline InitMode init_mode_from_string(const std::string& s) {
  if (s == "uninformative") return InitMode::uninformative;
  if (s == "ridge_init") return InitMode::ridge_init;
  throw validation_error("unknown init_mode '" + s + "'");
}

/// Solver knobs shared by the flat and decomposed trainers.
struct TrainConfig {
  double lambda = 1.0;       // data-fit vs prior trade-off
  double epsilon = 1e-3;     // ridge added to the normalized weight scatter
  double outer_tol = 1e-6;   // relative parameter change, prior loop
  double inner_tol = 1e-6;   // relative parameter change, per-task loop
  int max_outer_iter = 200;
  int max_inner_iter = 100;
  InitMode init_mode = InitMode::uninformative;
  std::uint64_t seed = 0;

  void validate() const {
    require(lambda > 0.0, "config: lambda must be positive");
    require(epsilon > 0.0, "config: epsilon must be positive");
    require(outer_tol > 0.0 && outer_tol < 1.0,
            "config: outer_tol must be in (0, 1)");
    require(inner_tol > 0.0 && inner_tol < 1.0,
            "config: inner_tol must be in (0, 1)");
    require(max_outer_iter > 0, "config: max_outer_iter must be positive");
    require(max_inner_iter > 0, "config: max_inner_iter must be positive");
  }
};

inline void validate_task(const TaskDataset& task) {
  require(task.n_electrodes >= 1,
          "task '" + task.task_id + "': needs at least one electrode");
  require(task.n_bands >= 1,
          "task '" + task.task_id + "': needs at least one band");
  require(task.electrode_names.empty() ||
              static_cast<Eigen::Index>(task.electrode_names.size()) ==
                  task.n_electrodes,
          "task '" + task.task_id + "': electrode name count mismatch");
  for (std::size_t i = 0; i < task.trials.size(); ++i) {
    const Trial& trial = task.trials[i];
    if (trial.features.rows() != task.n_electrodes ||
        trial.features.cols() != task.n_bands) {
      throw validation_error("task '" + task.task_id + "' trial " +
                             std::to_string(i) + ": feature shape mismatch");
    }
    if (!trial.features.allFinite()) {
      throw validation_error("task '" + task.task_id + "' trial " +
                             std::to_string(i) + ": non-finite feature value");
    }
    if (trial.label != 1 && trial.label != -1) {
      throw validation_error("task '" + task.task_id + "' trial " +
                             std::to_string(i) + ": label " +
                             std::to_string(trial.label) +
                             " outside {-1, +1}");
    }
  }
}

/// Checks shape uniformity, id uniqueness and per-task validity. Trainers
/// additionally require non-empty tasks carrying both labels.
inline void validate_collection(const TaskCollection& collection,
                                bool for_training = false) {
  require(!collection.tasks.empty(), "collection: no tasks");
  std::unordered_set<std::string> seen;
  const Eigen::Index e = collection.n_electrodes();
  const Eigen::Index f = collection.n_bands();
  for (std::size_t s = 0; s < collection.tasks.size(); ++s) {
    const TaskDataset& task = collection.tasks[s];
    validate_task(task);
    if (task.n_electrodes != e || task.n_bands != f) {
      throw validation_error(
          "task '" + task.task_id + "' (index " + std::to_string(s) +
          "): shape " + std::to_string(task.n_electrodes) + "x" +
          std::to_string(task.n_bands) + " differs from collection shape " +
          std::to_string(e) + "x" + std::to_string(f));
    }
    if (!seen.insert(task.task_id).second) {
      throw validation_error("duplicate task id '" + task.task_id + "'");
    }
    if (for_training) {
      require(!task.trials.empty(),
              "task '" + task.task_id + "': empty task cannot be trained");
      bool has_pos = false, has_neg = false;
      for (const Trial& t : task.trials) (t.label > 0 ? has_pos : has_neg) = true;
      require(has_pos && has_neg,
              "task '" + task.task_id + "': both labels required for training");
    }
  }
  require(collection.band_labels.empty() ||
              static_cast<Eigen::Index>(collection.band_labels.size()) == f,
          "collection: band label count mismatch");
}

/// Electrode-major flattening: the electrode index varies slowest, so an
/// ExF matrix becomes (row 0, row 1, ..., row E-1).
inline Eigen::VectorXd flatten_trial(const Eigen::MatrixXd& features) {
  const Eigen::Index e = features.rows(), f = features.cols();
  Eigen::VectorXd flat(e * f);
  for (Eigen::Index r = 0; r < e; ++r)
    flat.segment(r * f, f) = features.row(r).transpose();
  return flat;
}

inline Eigen::MatrixXd unflatten_trial(const Eigen::VectorXd& flat,
                                       Eigen::Index n_electrodes,
                                       Eigen::Index n_bands) {
  require(flat.size() == n_electrodes * n_bands,
          "unflatten: vector length does not match ExF");
  Eigen::MatrixXd features(n_electrodes, n_bands);
  for (Eigen::Index r = 0; r < n_electrodes; ++r)
    features.row(r) = flat.segment(r * n_bands, n_bands).transpose();
  return features;
}

/// Stacks a task into the (n x d) design matrix and +/-1 label vector used
/// by the flat solvers. Row i is trial i flattened electrode-major.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> flatten_trials(
    const TaskDataset& task) {
  const Eigen::Index n = task.size();
  Eigen::MatrixXd design(n, task.dim());
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i) = flatten_trial(task.trials[i].features).transpose();
    labels(i) = static_cast<double>(task.trials[i].label);
  }
  return {std::move(design), std::move(labels)};
}

/// Seeded stratified split: exactly n_train_per_class trials of each class
/// go to the training half, the rest to the test half. Selection is by
/// per-class shuffle; both halves keep the on-disk trial order.
inline std::pair<TaskDataset, TaskDataset> split_task(
    const TaskDataset& task, Eigen::Index n_train_per_class,
    std::uint64_t seed) {
  require(n_train_per_class >= 0, "split: negative per-class count");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < task.trials.size(); ++i)
    (task.trials[i].label > 0 ? pos : neg).push_back(i);
  if (static_cast<Eigen::Index>(pos.size()) < n_train_per_class ||
      static_cast<Eigen::Index>(neg.size()) < n_train_per_class) {
    throw validation_error(
        "task '" + task.task_id + "': cannot take " +
        std::to_string(n_train_per_class) + " training trials per class (" +
        std::to_string(pos.size()) + " positive, " +
        std::to_string(neg.size()) + " negative available)");
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<bool> in_train(task.trials.size(), false);
  for (Eigen::Index i = 0; i < n_train_per_class; ++i) {
    in_train[pos[static_cast<std::size_t>(i)]] = true;
    in_train[neg[static_cast<std::size_t>(i)]] = true;
  }
  TaskDataset train{task.task_id, task.n_electrodes, task.n_bands, {},
                    task.electrode_names};
  TaskDataset test{task.task_id, task.n_electrodes, task.n_bands, {},
                   task.electrode_names};
  for (std::size_t i = 0; i < task.trials.size(); ++i)
    (in_train[i] ? train : test).trials.push_back(task.trials[i]);
  return {std::move(train), std::move(test)};
}

/// Concatenates all tasks (manifest order) into one dataset, appending the
/// optional extra task last.
inline TaskDataset pool_tasks(const TaskCollection& collection,
                              const TaskDataset* extra = nullptr) {
  validate_collection(collection);
  TaskDataset pooled{"pooled", collection.n_electrodes(), collection.n_bands(),
                     {}, {}};
  for (const TaskDataset& task : collection.tasks)
    pooled.trials.insert(pooled.trials.end(), task.trials.begin(),
                         task.trials.end());
  if (extra != nullptr) {
    require(extra->n_electrodes == pooled.n_electrodes &&
                extra->n_bands == pooled.n_bands,
            "pool: extra task '" + extra->task_id + "' has mismatched shape");
    pooled.trials.insert(pooled.trials.end(), extra->trials.begin(),
                         extra->trials.end());
  }
  return pooled;
}

}  // namespace mtreg

#endif  // MTREG_DATA_HPP
