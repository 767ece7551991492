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
// On-disk formats:
//   - collection manifest: JSON {"tasks":[{"id","path"}], "electrodes",
//     "features_per_electrode", "band_labels"?}; trial paths are relative
//     to the manifest
//   - trial file: CSV, header "label,f_0,...,f_{d-1}", one row per trial,
//     features written with 17 significant digits (bit-exact round trip)
//   - fits: JSON with priors, per-task weights, objective trace, config echo
//   - raw recording: CSV "t,<ch>,..."; montage JSON {channel:[neighbors]};
//     band spec JSON [[low,high],...]

#ifndef MTREG_IO_HPP
#define MTREG_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/features.hpp"
#include "mtreg/multitask.hpp"

namespace mtreg {

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw validation_error("write failed for '" + path.string() + "'");
}

inline std::string format_double(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

inline double parse_double(const std::string& text,
                           const std::string& context) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw validation_error(context + ": cannot parse '" + text +
                           "' as a number");
  }
  while (consumed < text.size() &&
         (text[consumed] == ' ' || text[consumed] == '\t'))
    ++consumed;
  if (consumed != text.size())
    throw validation_error(context + ": trailing characters in '" + text + "'");
  if (!std::isfinite(value))
    throw validation_error(context + ": non-finite value '" + text + "'");
  return value;
}

inline int parse_label(const std::string& text, const std::string& context) {
  std::string trimmed = text;
  if (!trimmed.empty() && trimmed.front() == '+') trimmed.erase(0, 1);
  if (trimmed != "1" && trimmed != "-1")
    throw validation_error(context + ": label '" + text +
                           "' outside {-1, +1}");
  return trimmed == "1" ? 1 : -1;
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("'" + path.string() + "': " + e.what());
  }
}

inline std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                          c == '_'
                      ? c
                      : '_');
  return out.empty() ? std::string("task") : out;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json array = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v(i));
  return array;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& array,
                                        const std::string& context) {
  if (!array.is_array())
    throw validation_error(context + ": expected an array");
  Eigen::VectorXd v(array.size());
  for (std::size_t i = 0; i < array.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = array[i].get<double>();
  return v;
}

inline nlohmann::json matrix_to_json_row_major(const Eigen::MatrixXd& m) {
  nlohmann::json array = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) array.push_back(m(r, c));
  return array;
}

inline Eigen::MatrixXd matrix_from_json_row_major(const nlohmann::json& array,
                                                  Eigen::Index rows,
                                                  Eigen::Index cols,
                                                  const std::string& context) {
  if (!array.is_array() ||
      static_cast<Eigen::Index>(array.size()) != rows * cols)
    throw validation_error(context + ": expected " +
                           std::to_string(rows * cols) + " entries");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = array[k++].get<double>();
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trial collections
// ---------------------------------------------------------------------------

inline TaskDataset load_task_csv(const std::filesystem::path& path,
                                 const std::string& task_id,
                                 Eigen::Index n_electrodes,
                                 Eigen::Index n_bands) {
  const std::string text = detail::read_text_file(path);
  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line))
    throw validation_error("task '" + task_id + "': '" + path.string() +
                           "' is empty");
  const auto header = detail::split_csv_line(line);
  const Eigen::Index dim = n_electrodes * n_bands;
  if (header.empty() || header.front() != "label" ||
      static_cast<Eigen::Index>(header.size()) != dim + 1)
    throw validation_error("task '" + task_id + "': '" + path.string() +
                           "' header must be label,f_0,...,f_" +
                           std::to_string(dim - 1));
  TaskDataset task{task_id, n_electrodes, n_bands, {}, {}};
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    const std::string context =
        "task '" + task_id + "' trial " + std::to_string(row);
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1)
      throw validation_error(context + ": expected " + std::to_string(dim + 1) +
                             " columns, got " + std::to_string(fields.size()));
    Trial trial;
    trial.label = detail::parse_label(fields[0], context);
    Eigen::VectorXd flat(dim);
    for (Eigen::Index j = 0; j < dim; ++j)
      flat(j) = detail::parse_double(fields[static_cast<std::size_t>(j) + 1],
                                     context);
    trial.features = unflatten_trial(flat, n_electrodes, n_bands);
    task.trials.push_back(std::move(trial));
    ++row;
  }
  return task;
}

/// Loads a manifest and every task it lists, validating shapes and labels.
inline TaskCollection load_collection(const std::filesystem::path& manifest_path) {
  const nlohmann::json manifest = detail::parse_json_file(manifest_path);
  const std::string context = "'" + manifest_path.string() + "'";
  if (!manifest.contains("tasks") || !manifest["tasks"].is_array() ||
      manifest["tasks"].empty())
    throw validation_error(context + ": manifest needs a non-empty tasks array");
  if (!manifest.contains("electrodes") ||
      !manifest.contains("features_per_electrode"))
    throw validation_error(
        context + ": manifest needs electrodes and features_per_electrode");
  const Eigen::Index n_electrodes = manifest["electrodes"].get<Eigen::Index>();
  const Eigen::Index n_bands =
      manifest["features_per_electrode"].get<Eigen::Index>();
  require(n_electrodes >= 1 && n_bands >= 1,
          context + ": electrode and feature counts must be >= 1");

  TaskCollection collection;
  if (manifest.contains("band_labels")) {
    for (const auto& label : manifest["band_labels"])
      collection.band_labels.push_back(label.get<std::string>());
  }
  const std::filesystem::path base = manifest_path.parent_path();
  for (const auto& entry : manifest["tasks"]) {
    if (!entry.contains("id") || !entry.contains("path"))
      throw validation_error(context + ": each task needs id and path");
    const std::string id = entry["id"].get<std::string>();
    const std::filesystem::path path =
        base / entry["path"].get<std::string>();
    collection.tasks.push_back(
        load_task_csv(path, id, n_electrodes, n_bands));
    require(!collection.tasks.back().trials.empty(),
            "task '" + id + "': no trials in '" + path.string() + "'");
  }
  validate_collection(collection);
  return collection;
}

/// Writes one CSV per task plus the manifest into out_dir. Feature text uses
/// 17 significant digits, so load(save(c)) reproduces values bit-exactly.
inline std::filesystem::path save_collection(
    const TaskCollection& collection, const std::filesystem::path& out_dir,
    const std::string& manifest_name = "manifest.json") {
  validate_collection(collection);
  std::filesystem::create_directories(out_dir);
  nlohmann::json manifest;
  manifest["electrodes"] = collection.n_electrodes();
  manifest["features_per_electrode"] = collection.n_bands();
  if (!collection.band_labels.empty())
    manifest["band_labels"] = collection.band_labels;
  manifest["tasks"] = nlohmann::json::array();
  for (const TaskDataset& task : collection.tasks) {
    const std::string filename =
        detail::sanitize_filename(task.task_id) + ".csv";
    std::ostringstream csv;
    csv << "label";
    for (Eigen::Index j = 0; j < task.dim(); ++j) csv << ",f_" << j;
    csv << "\n";
    for (const Trial& trial : task.trials) {
      csv << trial.label;
      const Eigen::VectorXd flat = flatten_trial(trial.features);
      for (Eigen::Index j = 0; j < flat.size(); ++j)
        csv << "," << detail::format_double(flat(j));
      csv << "\n";
    }
    detail::write_text_file(out_dir / filename, csv.str());
    manifest["tasks"].push_back({{"id", task.task_id}, {"path", filename}});
  }
  const std::filesystem::path manifest_path = out_dir / manifest_name;
  detail::write_text_file(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

// ---------------------------------------------------------------------------
// Train config
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const TrainConfig& config) {
  return {{"lambda", config.lambda},
          {"epsilon", config.epsilon},
          {"outer_tol", config.outer_tol},
          {"inner_tol", config.inner_tol},
          {"max_outer_iter", config.max_outer_iter},
          {"max_inner_iter", config.max_inner_iter},
          {"init_mode", to_string(config.init_mode)},
          {"seed", config.seed}};
}

/// Applies fields present in the JSON object onto base; absent fields keep
/// their current values.
inline TrainConfig config_from_json(const nlohmann::json& j,
                                    TrainConfig base = {}) {
  if (j.contains("lambda")) base.lambda = j["lambda"].get<double>();
  if (j.contains("epsilon")) base.epsilon = j["epsilon"].get<double>();
  if (j.contains("outer_tol")) base.outer_tol = j["outer_tol"].get<double>();
  if (j.contains("inner_tol")) base.inner_tol = j["inner_tol"].get<double>();
  if (j.contains("max_outer_iter"))
    base.max_outer_iter = j["max_outer_iter"].get<int>();
  if (j.contains("max_inner_iter"))
    base.max_inner_iter = j["max_inner_iter"].get<int>();
  if (j.contains("init_mode"))
    base.init_mode = init_mode_from_string(j["init_mode"].get<std::string>());
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  base.validate();
  return base;
}

inline TrainConfig load_config(const std::filesystem::path& path,
                               TrainConfig base = {}) {
  return config_from_json(detail::parse_json_file(path), base);
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json prior_to_json(const GaussianPrior& prior) {
  return {{"mean", vector_to_json(prior.mean)},
          {"covariance", matrix_to_json_row_major(prior.covariance)}};
}

inline GaussianPrior prior_from_json(const nlohmann::json& j,
                                     const std::string& context) {
  GaussianPrior prior;
  prior.mean = vector_from_json(j.at("mean"), context + ".mean");
  const Eigen::Index d = prior.mean.size();
  prior.covariance = matrix_from_json_row_major(j.at("covariance"), d, d,
                                                context + ".covariance");
  prior.validate();
  return prior;
}

}  // namespace detail

inline nlohmann::json fit_to_json(const MtlFit& fit,
                                  const TrainConfig& config) {
  nlohmann::json j;
  j["type"] = "flat";
  j["config"] = config_to_json(config);
  j["prior"] = detail::prior_to_json(fit.prior);
  j["task_ids"] = fit.task_ids;
  j["task_weights"] = detail::matrix_to_json_row_major(fit.task_weights);
  j["objective_trace"] = fit.objective_trace;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

inline nlohmann::json fit_to_json(const FdFit& fit, const TrainConfig& config) {
  nlohmann::json j;
  j["type"] = "fd";
  j["config"] = config_to_json(config);
  j["prior_w"] = detail::prior_to_json(fit.prior_w);
  j["prior_alpha"] = detail::prior_to_json(fit.prior_alpha);
  j["task_ids"] = fit.task_ids;
  j["task_models"] = nlohmann::json::array();
  for (const FdModel& model : fit.task_models)
    j["task_models"].push_back({{"alpha", detail::vector_to_json(model.alpha)},
                                {"w", detail::vector_to_json(model.w)}});
  const FdCanonical canonical =
      canonicalize({fit.prior_alpha.mean, fit.prior_w.mean});
  j["canonicalization"] = {{"alpha_norm", canonical.alpha_norm},
                           {"sign", canonical.sign}};
  j["objective_trace"] = fit.objective_trace;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

inline void save_fit(const MtlFit& fit, const TrainConfig& config,
                     const std::filesystem::path& path) {
  detail::write_text_file(path, fit_to_json(fit, config).dump(2) + "\n");
}

inline void save_fit(const FdFit& fit, const TrainConfig& config,
                     const std::filesystem::path& path) {
  detail::write_text_file(path, fit_to_json(fit, config).dump(2) + "\n");
}

inline std::string fit_type(const std::filesystem::path& path) {
  return detail::parse_json_file(path).at("type").get<std::string>();
}

inline std::pair<MtlFit, TrainConfig> load_flat_fit(
    const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  const std::string context = "'" + path.string() + "'";
  if (j.at("type").get<std::string>() != "flat")
    throw validation_error(context + ": not a flat fit");
  MtlFit fit;
  fit.prior = detail::prior_from_json(j.at("prior"), context + ".prior");
  fit.task_ids = j.at("task_ids").get<std::vector<std::string>>();
  const Eigen::Index n_tasks = static_cast<Eigen::Index>(fit.task_ids.size());
  fit.task_weights = detail::matrix_from_json_row_major(
      j.at("task_weights"), n_tasks, fit.prior.dim(),
      context + ".task_weights");
  fit.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  fit.iterations = j.at("iterations").get<int>();
  fit.converged = j.at("converged").get<bool>();
  return {std::move(fit), config_from_json(j.at("config"))};
}

inline std::pair<FdFit, TrainConfig> load_fd_fit(
    const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  const std::string context = "'" + path.string() + "'";
  if (j.at("type").get<std::string>() != "fd")
    throw validation_error(context + ": not a feature-decomposition fit");
  FdFit fit;
  fit.prior_w = detail::prior_from_json(j.at("prior_w"), context + ".prior_w");
  fit.prior_alpha =
      detail::prior_from_json(j.at("prior_alpha"), context + ".prior_alpha");
  fit.task_ids = j.at("task_ids").get<std::vector<std::string>>();
  for (const auto& entry : j.at("task_models")) {
    FdModel model;
    model.alpha =
        detail::vector_from_json(entry.at("alpha"), context + ".alpha");
    model.w = detail::vector_from_json(entry.at("w"), context + ".w");
    require(model.alpha.size() == fit.prior_alpha.dim() &&
                model.w.size() == fit.prior_w.dim(),
            context + ": task model shape mismatch");
    fit.task_models.push_back(std::move(model));
  }
  fit.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  fit.iterations = j.at("iterations").get<int>();
  fit.converged = j.at("converged").get<bool>();
  return {std::move(fit), config_from_json(j.at("config"))};
}

// ---------------------------------------------------------------------------
// Raw recordings (feature-extraction inputs)
// ---------------------------------------------------------------------------

/// CSV with header "t,<name>,<name>,..." and one row per sample. The sample
/// rate is derived from the time column, which must be uniformly spaced.
inline RawRecording load_recording_csv(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  std::istringstream lines(text);
  std::string line;
  const std::string context = "'" + path.string() + "'";
  if (!std::getline(lines, line))
    throw validation_error(context + ": empty recording");
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.front() != "t")
    throw validation_error(context + ": header must be t,<channel>,...");
  RawRecording rec;
  rec.channel_names.assign(header.begin() + 1, header.end());
  const std::size_t n_channels = rec.channel_names.size();

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(lines, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    const std::string row_context =
        context + " row " + std::to_string(times.size());
    if (fields.size() != n_channels + 1)
      throw validation_error(row_context + ": expected " +
                             std::to_string(n_channels + 1) + " columns");
    times.push_back(detail::parse_double(fields[0], row_context));
    for (std::size_t c = 0; c < n_channels; ++c)
      values.push_back(detail::parse_double(fields[c + 1], row_context));
  }
  require(times.size() >= 2, context + ": need at least two samples");
  const double dt = times[1] - times[0];
  require(dt > 0.0, context + ": time column must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    require(std::abs(step - dt) <= 1e-6 * dt,
            context + ": non-uniform sampling near row " + std::to_string(i));
  }
  rec.sample_rate = 1.0 / dt;
  rec.samples.resize(static_cast<Eigen::Index>(n_channels),
                     static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t c = 0; c < n_channels; ++c)
      rec.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
          values[i * n_channels + c];
  return rec;
}

inline std::map<std::string, std::vector<std::string>> load_montage_json(
    const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_object())
    throw validation_error("'" + path.string() +
                           "': montage must be an object");
  std::map<std::string, std::vector<std::string>> montage;
  for (const auto& [channel, neighbors] : j.items())
    montage[channel] = neighbors.get<std::vector<std::string>>();
  return montage;
}

inline BandSpec load_bands_json(const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_array())
    throw validation_error("'" + path.string() +
                           "': band spec must be an array of [low, high]");
  BandSpec spec;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw validation_error("'" + path.string() +
                             "': each band must be [low, high]");
    spec.bands.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return spec;
}

inline std::vector<std::string> load_string_list_json(
    const std::filesystem::path& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_array())
    throw validation_error("'" + path.string() + "': expected a JSON array");
  return j.get<std::vector<std::string>>();
}

}  // namespace mtreg

#endif  // MTREG_IO_HPP
