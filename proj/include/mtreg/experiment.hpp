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
// Batch evaluation protocols: leave-one-task-out transfer with learning
// curves over training-trial counts, sequential session-to-session
// transfer, and export of the learned spatial/spectral topography.
// Reports are deterministic for a fixed manifest, config and seed, also
// under concurrent execution: every grid cell computes into its own slot
// and assembly is an ordered merge.

#ifndef MTREG_EXPERIMENT_HPP
#define MTREG_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mtreg/adaptation.hpp"
#include "mtreg/baselines.hpp"
#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/io.hpp"
#include "mtreg/multitask.hpp"
#include "mtreg/rng.hpp"

namespace mtreg {

enum class Algorithm { mt, mt_fd, rr, rr_fd };
enum class DataMode { pooled, single };

inline std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::mt: return "mt";
    case Algorithm::mt_fd: return "mt_fd";
    case Algorithm::rr: return "rr";
    case Algorithm::rr_fd: return "rr_fd";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "mt") return Algorithm::mt;
  if (s == "mt_fd") return Algorithm::mt_fd;
  if (s == "rr") return Algorithm::rr;
  if (s == "rr_fd") return Algorithm::rr_fd;
  throw validation_error("unknown algorithm '" + s + "'");
}

inline std::string to_string(DataMode mode) {
  return mode == DataMode::pooled ? "pooled" : "single";
}

inline DataMode data_mode_from_string(const std::string& s) {
  if (s == "pooled") return DataMode::pooled;
  if (s == "single") return DataMode::single;
  throw validation_error("unknown data mode '" + s + "'");
}

inline bool is_multitask(Algorithm alg) {
  return alg == Algorithm::mt || alg == Algorithm::mt_fd;
}

inline bool uses_decomposition(Algorithm alg) {
  return alg == Algorithm::mt_fd || alg == Algorithm::rr_fd;
}

struct LosoOptions {
  Algorithm algorithm = Algorithm::mt_fd;
  DataMode data_mode = DataMode::single;  // controls; multitask runs ignore it
  std::vector<int> trial_grid = {0, 10, 20, 40, 70, 100};
  TrainConfig config;
  std::optional<double> adapt_lambda;  // pin instead of cross-validating
  std::vector<double> lambda_grid = default_lambda_grid();
  int cv_folds = 5;
};

struct CellResult {
  std::string task_id;
  int n_train_per_class = 0;
  double lambda = 0.0;
  long n_test = 0;
  long n_correct = 0;
  double accuracy = 0.0;
};

struct AccuracySummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct LosoReport {
  Algorithm algorithm = Algorithm::mt_fd;
  DataMode data_mode = DataMode::single;
  TrainConfig config;
  std::vector<int> trial_grid;
  std::vector<std::string> task_ids;
  std::vector<CellResult> cells;  // task-major, grid order within a task
  std::vector<AccuracySummary> summaries;  // one per grid entry
};

namespace detail {

inline double quantile(std::vector<double> values, double p) {
  require(!values.empty(), "quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

inline AccuracySummary summarize_accuracies(const std::vector<double>& acc) {
  AccuracySummary s;
  const double n = static_cast<double>(acc.size());
  double sum = 0.0;
  for (double a : acc) sum += a;
  s.mean = sum / n;
  double ss = 0.0;
  for (double a : acc) ss += (a - s.mean) * (a - s.mean);
  s.stddev = acc.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = *std::min_element(acc.begin(), acc.end());
  s.max = *std::max_element(acc.begin(), acc.end());
  s.q1 = quantile(acc, 0.25);
  s.median = quantile(acc, 0.5);
  s.q3 = quantile(acc, 0.75);
  return s;
}

/// Cross-validates when the training set supports it (two classes with at
/// least two trials each and at least two folds); otherwise falls back to
/// the configured lambda.
inline double choose_lambda(const TaskDataset& train, ModelKind kind,
                            const CvPriors& priors, const TrainConfig& config,
                            const std::optional<double>& pinned,
                            const std::vector<double>& grid, int folds) {
  if (pinned) return *pinned;
  if (grid.empty()) return config.lambda;
  if (grid.size() == 1) return grid.front();
  Eigen::Index n_pos = 0, n_neg = 0;
  for (const Trial& t : train.trials) (t.label > 0 ? n_pos : n_neg) += 1;
  const int k = std::min<int>(folds, static_cast<int>(train.size()));
  if (k < 2 || n_pos < 2 || n_neg < 2) return config.lambda;
  return cross_validate_lambda(train, grid, k, kind, priors, config);
}

struct TrainedPriors {
  std::optional<MtlFit> flat;
  std::optional<FdFit> fd;
};

inline TrainedPriors train_transfer_priors(const TaskCollection& training,
                                           Algorithm alg,
                                           const TrainConfig& config) {
  TrainedPriors priors;
  if (alg == Algorithm::mt) priors.flat = train_multitask(training, config);
  if (alg == Algorithm::mt_fd)
    priors.fd = train_multitask_fd(training, config);
  return priors;
}

inline CellResult evaluate_cell(const TaskDataset& held_out,
                                const TaskCollection& others,
                                const TrainedPriors& priors,
                                const LosoOptions& options, int n_per_class,
                                std::uint64_t cell_seed) {
  auto [adapt_train, test] = split_task(held_out, n_per_class, cell_seed);
  const TrainConfig& config = options.config;

  CellResult cell;
  cell.task_id = held_out.task_id;
  cell.n_train_per_class = n_per_class;

  std::function<double(const Trial&)> score;
  switch (options.algorithm) {
    case Algorithm::mt: {
      CvPriors cv;
      cv.flat = priors.flat->prior;
      cell.lambda = choose_lambda(adapt_train, ModelKind::flat, cv, config,
                                  options.adapt_lambda, options.lambda_grid,
                                  options.cv_folds);
      FlatModel model = adapt_flat(adapt_train, priors.flat->prior,
                                   cell.lambda);
      score = [w = model.w](const Trial& t) {
        return flatten_trial(t.features).dot(w);
      };
      break;
    }
    case Algorithm::mt_fd: {
      CvPriors cv;
      cv.w = priors.fd->prior_w;
      cv.alpha = priors.fd->prior_alpha;
      cell.lambda = choose_lambda(adapt_train, ModelKind::fd, cv, config,
                                  options.adapt_lambda, options.lambda_grid,
                                  options.cv_folds);
      FdModel model = adapt_fd(adapt_train, priors.fd->prior_w,
                               priors.fd->prior_alpha, cell.lambda, config);
      score = [model](const Trial& t) {
        return fd_predict_raw(t.features, model);
      };
      break;
    }
    case Algorithm::rr: {
      TaskDataset train = options.data_mode == DataMode::pooled
                              ? pool_tasks(others, &adapt_train)
                              : adapt_train;
      cell.lambda = choose_lambda(train, ModelKind::flat, {}, config,
                                  options.adapt_lambda, options.lambda_grid,
                                  options.cv_folds);
      auto [X, y] = flatten_trials(train);
      FlatModel model = ridge_train(X, y, cell.lambda);
      score = [w = model.w](const Trial& t) {
        return flatten_trial(t.features).dot(w);
      };
      break;
    }
    case Algorithm::rr_fd: {
      TaskDataset train = options.data_mode == DataMode::pooled
                              ? pool_tasks(others, &adapt_train)
                              : adapt_train;
      cell.lambda = choose_lambda(train, ModelKind::fd, {}, config,
                                  options.adapt_lambda, options.lambda_grid,
                                  options.cv_folds);
      FdModel model = ridge_fd_train(train, cell.lambda, config);
      score = [model](const Trial& t) {
        return fd_predict_raw(t.features, model);
      };
      break;
    }
  }

  cell.n_test = static_cast<long>(test.size());
  for (const Trial& trial : test.trials)
    if (sign_label(score(trial)) == trial.label) ++cell.n_correct;
  cell.accuracy = cell.n_test == 0 ? 0.0
                                   : static_cast<double>(cell.n_correct) /
                                         static_cast<double>(cell.n_test);
  return cell;
}

}  // namespace detail

/// Leave-one-task-out evaluation. Each task is held out in turn; the
/// multitask algorithms learn their priors on the remaining tasks once per
/// held-out task, then every grid entry adapts with that many seeded
/// training trials per class and scores the rest. Held-out tasks evaluate
/// concurrently.
inline LosoReport run_loso(const TaskCollection& collection,
                           const LosoOptions& options) {
  options.config.validate();
  validate_collection(collection);
  const Eigen::Index n_tasks = collection.size();
  require(!is_multitask(options.algorithm) || n_tasks >= 2,
          "leave-one-task-out transfer needs at least two tasks");
  for (int m : options.trial_grid)
    require(m >= 0, "trial grid entries must be non-negative");

  LosoReport report;
  report.algorithm = options.algorithm;
  report.data_mode = options.data_mode;
  report.config = options.config;
  report.trial_grid = options.trial_grid;
  for (const TaskDataset& task : collection.tasks)
    report.task_ids.push_back(task.task_id);

  std::vector<std::vector<CellResult>> per_task(
      static_cast<std::size_t>(n_tasks));
  parallel_for(static_cast<std::size_t>(n_tasks), [&](std::size_t t) {
    const TaskDataset& held_out =
        collection.tasks[static_cast<std::size_t>(t)];
    TaskCollection others;
    others.band_labels = collection.band_labels;
    for (std::size_t s = 0; s < collection.tasks.size(); ++s)
      if (s != t) others.tasks.push_back(collection.tasks[s]);

    detail::TrainedPriors priors;
    try {
      priors = detail::train_transfer_priors(others, options.algorithm,
                                             options.config);
      for (std::size_t g = 0; g < options.trial_grid.size(); ++g) {
        per_task[t].push_back(detail::evaluate_cell(
            held_out, others, priors, options, options.trial_grid[g],
            mix_seed(options.config.seed, t, g)));
      }
    } catch (const validation_error& e) {
      throw validation_error("held-out task '" + held_out.task_id +
                             "': " + e.what());
    } catch (const error& e) {
      throw solver_error("held-out task '" + held_out.task_id +
                         "': " + e.what());
    }
  });

  for (const auto& cells : per_task)
    report.cells.insert(report.cells.end(), cells.begin(), cells.end());
  for (std::size_t g = 0; g < options.trial_grid.size(); ++g) {
    std::vector<double> accuracies;
    for (const auto& cells : per_task) accuracies.push_back(cells[g].accuracy);
    report.summaries.push_back(detail::summarize_accuracies(accuracies));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Session-to-session transfer
// ---------------------------------------------------------------------------

struct SessionOptions {
  Algorithm algorithm = Algorithm::mt_fd;
  DataMode data_mode = DataMode::single;
  TrainConfig config;
  int adapt_block_size = 20;  // trials of each session's first run
  std::optional<double> adapt_lambda;
  std::vector<double> lambda_grid = default_lambda_grid();
  int cv_folds = 5;
};

struct SessionOutcome {
  std::string session_id;
  bool skipped = false;
  std::string note;
  double lambda = 0.0;
  long n_test = 0;
  long n_correct = 0;
  double accuracy = 0.0;
};

struct SessionReport {
  Algorithm algorithm = Algorithm::mt_fd;
  DataMode data_mode = DataMode::single;
  TrainConfig config;
  int adapt_block_size = 20;
  std::vector<SessionOutcome> sessions;  // one per target session (2..S)
  AccuracySummary stats;                 // over non-skipped sessions
};

/// Sequential protocol over sessions in manifest order: for each target
/// session k+1, the priors (or pooled controls) train on sessions 1..k, the
/// target's first adapt_block_size trials adapt the model, and the rest of
/// the target session is scored. Sessions that do not extend past the first
/// block are skipped with a note.
inline SessionReport run_session_transfer(const TaskCollection& sessions,
                                          const SessionOptions& options) {
  options.config.validate();
  validate_collection(sessions);
  require(sessions.size() >= 2, "session transfer needs at least two sessions");
  require(options.adapt_block_size >= 1, "adapt block size must be >= 1");

  SessionReport report;
  report.algorithm = options.algorithm;
  report.data_mode = options.data_mode;
  report.config = options.config;
  report.adapt_block_size = options.adapt_block_size;
  report.sessions.resize(static_cast<std::size_t>(sessions.size()) - 1);

  parallel_for(report.sessions.size(), [&](std::size_t idx) {
    const std::size_t target_index = idx + 1;
    const TaskDataset& target = sessions.tasks[target_index];
    SessionOutcome outcome;
    outcome.session_id = target.task_id;
    const Eigen::Index block =
        static_cast<Eigen::Index>(options.adapt_block_size);
    if (target.size() <= block) {
      outcome.skipped = true;
      outcome.note = "single block (" + std::to_string(target.size()) +
                     " trials <= block size " + std::to_string(block) + ")";
      report.sessions[idx] = std::move(outcome);
      return;
    }
    TaskCollection history;
    history.band_labels = sessions.band_labels;
    for (std::size_t s = 0; s < target_index; ++s)
      history.tasks.push_back(sessions.tasks[s]);

    TaskDataset adapt{target.task_id, target.n_electrodes, target.n_bands,
                      {}, target.electrode_names};
    TaskDataset test = adapt;
    for (Eigen::Index i = 0; i < target.size(); ++i)
      (i < block ? adapt : test)
          .trials.push_back(target.trials[static_cast<std::size_t>(i)]);

    try {
      const detail::TrainedPriors priors = detail::train_transfer_priors(
          history, options.algorithm, options.config);
      std::function<double(const Trial&)> score;
      switch (options.algorithm) {
        case Algorithm::mt: {
          CvPriors cv;
          cv.flat = priors.flat->prior;
          outcome.lambda = detail::choose_lambda(
              adapt, ModelKind::flat, cv, options.config,
              options.adapt_lambda, options.lambda_grid, options.cv_folds);
          FlatModel model =
              adapt_flat(adapt, priors.flat->prior, outcome.lambda);
          score = [w = model.w](const Trial& t) {
            return flatten_trial(t.features).dot(w);
          };
          break;
        }
        case Algorithm::mt_fd: {
          CvPriors cv;
          cv.w = priors.fd->prior_w;
          cv.alpha = priors.fd->prior_alpha;
          outcome.lambda = detail::choose_lambda(
              adapt, ModelKind::fd, cv, options.config, options.adapt_lambda,
              options.lambda_grid, options.cv_folds);
          FdModel model = adapt_fd(adapt, priors.fd->prior_w,
                                   priors.fd->prior_alpha, outcome.lambda,
                                   options.config);
          score = [model](const Trial& t) {
            return fd_predict_raw(t.features, model);
          };
          break;
        }
        case Algorithm::rr: {
          TaskDataset train = options.data_mode == DataMode::pooled
                                  ? pool_tasks(history, &adapt)
                                  : adapt;
          outcome.lambda = detail::choose_lambda(
              train, ModelKind::flat, {}, options.config,
              options.adapt_lambda, options.lambda_grid, options.cv_folds);
          auto [X, y] = flatten_trials(train);
          FlatModel model = ridge_train(X, y, outcome.lambda);
          score = [w = model.w](const Trial& t) {
            return flatten_trial(t.features).dot(w);
          };
          break;
        }
        case Algorithm::rr_fd: {
          TaskDataset train = options.data_mode == DataMode::pooled
                                  ? pool_tasks(history, &adapt)
                                  : adapt;
          outcome.lambda = detail::choose_lambda(
              train, ModelKind::fd, {}, options.config, options.adapt_lambda,
              options.lambda_grid, options.cv_folds);
          FdModel model = ridge_fd_train(train, outcome.lambda,
                                         options.config);
          score = [model](const Trial& t) {
            return fd_predict_raw(t.features, model);
          };
          break;
        }
      }
      outcome.n_test = static_cast<long>(test.size());
      for (const Trial& trial : test.trials)
        if (sign_label(score(trial)) == trial.label) ++outcome.n_correct;
      outcome.accuracy = static_cast<double>(outcome.n_correct) /
                         static_cast<double>(outcome.n_test);
    } catch (const validation_error& e) {
      throw validation_error("target session '" + target.task_id +
                             "': " + e.what());
    } catch (const error& e) {
      throw solver_error("target session '" + target.task_id +
                         "': " + e.what());
    }
    report.sessions[idx] = std::move(outcome);
  });

  std::vector<double> accuracies;
  for (const SessionOutcome& outcome : report.sessions)
    if (!outcome.skipped) accuracies.push_back(outcome.accuracy);
  require(!accuracies.empty(), "session transfer: every session was skipped");
  report.stats = detail::summarize_accuracies(accuracies);
  return report;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fixed4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

inline nlohmann::json summary_to_json(const AccuracySummary& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"min", s.min},
          {"q1", s.q1},     {"median", s.median}, {"q3", s.q3},
          {"max", s.max}};
}

}  // namespace detail

inline nlohmann::json loso_report_json(const LosoReport& report) {
  nlohmann::json j;
  j["protocol"] = "loso";
  j["algorithm"] = to_string(report.algorithm);
  j["data_mode"] = to_string(report.data_mode);
  j["config"] = config_to_json(report.config);
  j["trial_grid"] = report.trial_grid;
  j["task_ids"] = report.task_ids;
  j["cells"] = nlohmann::json::array();
  for (const CellResult& cell : report.cells) {
    j["cells"].push_back({{"task_id", cell.task_id},
                          {"n_train_per_class", cell.n_train_per_class},
                          {"lambda", cell.lambda},
                          {"n_test", cell.n_test},
                          {"n_correct", cell.n_correct},
                          {"accuracy", cell.accuracy}});
  }
  j["summaries"] = nlohmann::json::array();
  for (std::size_t g = 0; g < report.summaries.size(); ++g) {
    nlohmann::json s = detail::summary_to_json(report.summaries[g]);
    s["n_train_per_class"] = report.trial_grid[g];
    j["summaries"].push_back(std::move(s));
  }
  return j;
}

inline std::string loso_report_table(const LosoReport& report) {
  std::string out;
  out += "loso  algorithm=" + to_string(report.algorithm) +
         "  data_mode=" + to_string(report.data_mode) +
         "  seed=" + std::to_string(report.config.seed) + "\n";
  out += "n_train  mean    std     min     median  max\n";
  for (std::size_t g = 0; g < report.summaries.size(); ++g) {
    const AccuracySummary& s = report.summaries[g];
    char line[128];
    std::snprintf(line, sizeof(line), "%-8d %s  %s  %s  %s  %s\n",
                  report.trial_grid[g], detail::fixed4(s.mean).c_str(),
                  detail::fixed4(s.stddev).c_str(),
                  detail::fixed4(s.min).c_str(),
                  detail::fixed4(s.median).c_str(),
                  detail::fixed4(s.max).c_str());
    out += line;
  }
  return out;
}

inline nlohmann::json session_report_json(const SessionReport& report) {
  nlohmann::json j;
  j["protocol"] = "sessions";
  j["algorithm"] = to_string(report.algorithm);
  j["data_mode"] = to_string(report.data_mode);
  j["config"] = config_to_json(report.config);
  j["adapt_block_size"] = report.adapt_block_size;
  j["sessions"] = nlohmann::json::array();
  for (const SessionOutcome& outcome : report.sessions) {
    nlohmann::json s = {{"session_id", outcome.session_id},
                        {"skipped", outcome.skipped}};
    if (outcome.skipped) {
      s["note"] = outcome.note;
    } else {
      s["lambda"] = outcome.lambda;
      s["n_test"] = outcome.n_test;
      s["n_correct"] = outcome.n_correct;
      s["accuracy"] = outcome.accuracy;
    }
    j["sessions"].push_back(std::move(s));
  }
  j["stats"] = detail::summary_to_json(report.stats);
  return j;
}

inline std::string session_report_table(const SessionReport& report) {
  std::string out;
  out += "sessions  algorithm=" + to_string(report.algorithm) +
         "  data_mode=" + to_string(report.data_mode) + "\n";
  out += "session           accuracy\n";
  for (const SessionOutcome& outcome : report.sessions) {
    char line[160];
    if (outcome.skipped) {
      std::snprintf(line, sizeof(line), "%-16s  skipped: %s\n",
                    outcome.session_id.c_str(), outcome.note.c_str());
    } else {
      std::snprintf(line, sizeof(line), "%-16s  %s\n",
                    outcome.session_id.c_str(),
                    detail::fixed4(outcome.accuracy).c_str());
    }
    out += line;
  }
  out += "median=" + detail::fixed4(report.stats.median) +
         "  q1=" + detail::fixed4(report.stats.q1) +
         "  q3=" + detail::fixed4(report.stats.q3) +
         "  min=" + detail::fixed4(report.stats.min) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Topography export
// ---------------------------------------------------------------------------

namespace detail {

inline std::string bar_chart_svg(const std::string& title,
                                 const std::vector<std::string>& names,
                                 const std::vector<double>& values,
                                 double y_offset) {
  const double bar_width = 28.0, gap = 6.0, height = 120.0, base = 150.0;
  double peak = 1e-12;
  for (double v : values) peak = std::max(peak, std::abs(v));
  std::string svg = "<text x=\"10\" y=\"" + std::to_string(y_offset + 16) +
                    "\" font-size=\"14\">" + title + "</text>\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = 10.0 + static_cast<double>(i) * (bar_width + gap);
    const double h = std::abs(values[i]) / peak * height;
    const double y =
        values[i] >= 0.0 ? y_offset + base - h : y_offset + base;
    const char* color = values[i] >= 0.0 ? "#c23b22" : "#22629c";
    char rect[256];
    std::snprintf(rect, sizeof(rect),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\""
                  " fill=\"%s\"/>\n",
                  x, y, bar_width, std::max(h, 0.5), color);
    svg += rect;
    char label[256];
    std::snprintf(label, sizeof(label),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"9\""
                  " text-anchor=\"middle\">%s</text>\n",
                  x + bar_width / 2, y_offset + base + height + 14.0,
                  names[i].c_str());
    svg += label;
  }
  return svg;
}

}  // namespace detail

/// Writes the canonicalized spatial prior mean per electrode and the
/// absolute spectral prior mean per band as a three-column CSV
/// (kind,name,value): E electrode rows followed by F band rows. Empty name
/// lists fall back to generated ch_<e> / band_<f> names; non-empty lists
/// must match the fit's dimensions. An optional SVG renders both as bar
/// strips.
inline void export_topography(const FdFit& fit,
                              std::vector<std::string> electrode_names,
                              std::vector<std::string> band_labels,
                              const std::filesystem::path& csv_path,
                              const std::filesystem::path& svg_path = {}) {
  const Eigen::Index n_electrodes = fit.prior_alpha.dim();
  const Eigen::Index n_bands = fit.prior_w.dim();
  if (electrode_names.empty())
    for (Eigen::Index e = 0; e < n_electrodes; ++e)
      electrode_names.push_back("ch_" + std::to_string(e));
  if (band_labels.empty())
    for (Eigen::Index f = 0; f < n_bands; ++f)
      band_labels.push_back("band_" + std::to_string(f));
  require(static_cast<Eigen::Index>(electrode_names.size()) == n_electrodes,
          "topography: electrode name count does not match fit");
  require(static_cast<Eigen::Index>(band_labels.size()) == n_bands,
          "topography: band label count does not match fit");

  const FdCanonical canonical =
      canonicalize({fit.prior_alpha.mean, fit.prior_w.mean});
  std::string csv = "kind,name,value\n";
  for (Eigen::Index e = 0; e < n_electrodes; ++e)
    csv += "electrode," + electrode_names[static_cast<std::size_t>(e)] + "," +
           detail::format_double(canonical.alpha(e)) + "\n";
  for (Eigen::Index f = 0; f < n_bands; ++f)
    csv += "band," + band_labels[static_cast<std::size_t>(f)] + "," +
           detail::format_double(std::abs(canonical.w(f))) + "\n";
  detail::write_text_file(csv_path, csv);

  if (!svg_path.empty()) {
    std::vector<double> alpha(canonical.alpha.data(),
                              canonical.alpha.data() + n_electrodes);
    std::vector<double> w_abs;
    for (Eigen::Index f = 0; f < n_bands; ++f)
      w_abs.push_back(std::abs(canonical.w(f)));
    const double width =
        40.0 + 34.0 * static_cast<double>(std::max(n_electrodes, n_bands));
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(static_cast<int>(width)) +
                      "\" height=\"640\">\n";
    svg += detail::bar_chart_svg("spatial weights (canonical)",
                                 electrode_names, alpha, 0.0);
    svg += detail::bar_chart_svg("spectral weights (absolute)", band_labels,
                                 w_abs, 320.0);
    svg += "</svg>\n";
    detail::write_text_file(svg_path, svg);
  }
}

/// Mean-accuracy learning curve for a leave-one-task-out report.
inline void write_learning_curve_svg(const LosoReport& report,
                                     const std::filesystem::path& svg_path) {
  require(!report.summaries.empty(), "learning curve: empty report");
  const double width = 480.0, height = 320.0, margin = 48.0;
  double max_count = 1.0;
  for (int m : report.trial_grid)
    max_count = std::max(max_count, static_cast<double>(m));
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\""
                    " height=\"320\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"320\" fill=\"white\"/>\n";
  std::string points;
  for (std::size_t g = 0; g < report.summaries.size(); ++g) {
    const double x = margin + (width - 2 * margin) *
                                  static_cast<double>(report.trial_grid[g]) /
                                  max_count;
    const double y =
        height - margin -
        (height - 2 * margin) * (report.summaries[g].mean - 0.4) / 0.6;
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.1f,%.1f ", x, y);
    points += buffer;
  }
  svg += "<polyline fill=\"none\" stroke=\"#c23b22\" stroke-width=\"2\""
         " points=\"" + points + "\"/>\n";
  svg += "<text x=\"16\" y=\"24\" font-size=\"13\">mean accuracy vs training"
         " trials per class (" + to_string(report.algorithm) + ")</text>\n";
  svg += "</svg>\n";
  detail::write_text_file(svg_path, svg);
}

}  // namespace mtreg

#endif  // MTREG_EXPERIMENT_HPP
