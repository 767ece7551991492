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
// From multichannel time series to trial feature matrices: surface-Laplacian
// spatial filtering followed by Hanning-windowed DFT log-bandpower per
// channel and band.

#ifndef MTREG_FEATURES_HPP
#define MTREG_FEATURES_HPP

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "mtreg/common.hpp"

namespace mtreg {

/// Power floor added before taking the log, so silent segments stay finite.
inline constexpr double kPowerFloor = 1e-20;

struct RawRecording {
  Eigen::MatrixXd samples;  // channels x time, volts
  double sample_rate = 0.0;
  std::vector<std::string> channel_names;
  std::map<std::string, std::vector<std::string>> montage;  // name -> neighbors

  Eigen::Index n_channels() const { return samples.rows(); }
  Eigen::Index n_samples() const { return samples.cols(); }
};

inline void validate_recording(const RawRecording& rec) {
  require(rec.n_samples() >= 2, "recording: need at least two samples");
  require(rec.sample_rate > 0.0, "recording: sample rate must be positive");
  require(static_cast<Eigen::Index>(rec.channel_names.size()) ==
              rec.n_channels(),
          "recording: channel name count mismatch");
  for (const auto& [channel, neighbors] : rec.montage) {
    auto known = [&](const std::string& name) {
      for (const auto& c : rec.channel_names)
        if (c == name) return true;
      return false;
    };
    require(known(channel), "montage: unknown channel '" + channel + "'");
    for (const auto& n : neighbors)
      require(known(n), "montage: unknown neighbor '" + n + "' of '" +
                            channel + "'");
  }
}

/// Half-open frequency bands [low, high); adjacent bands partition the
/// spectrum without double counting. DFT bins are assigned by bin center
/// frequency.
struct BandSpec {
  std::vector<std::pair<double, double>> bands;

  std::size_t size() const { return bands.size(); }

  void validate(double sample_rate) const {
    require(!bands.empty(), "band spec: no bands");
    for (const auto& [low, high] : bands) {
      require(low < high, "band spec: band [" + std::to_string(low) + ", " +
                              std::to_string(high) + ") is empty");
      require(low >= 0.0, "band spec: negative band edge");
      require(high <= sample_rate / 2.0,
              "band spec: band [" + std::to_string(low) + ", " +
                  std::to_string(high) + ") exceeds the Nyquist frequency");
    }
  }

  /// The twelve 2 Hz bands from 7 to 29 Hz.
  static BandSpec motor_imagery_default() {
    BandSpec spec;
    for (int b = 0; b < 12; ++b)
      spec.bands.emplace_back(7.0 + 2.0 * b, 9.0 + 2.0 * b);
    return spec;
  }

  /// The seven named bands delta through gamma2 (1-5, 5-8, 8-12, 12-20,
  /// 20-30, 30-70, 70-90 Hz).
  static BandSpec named_bands_default() {
    return BandSpec{{{1, 5}, {5, 8}, {8, 12}, {12, 20}, {20, 30}, {30, 70},
                     {70, 90}}};
  }

  static std::vector<std::string> named_band_labels() {
    return {"delta", "theta", "alpha", "beta1", "beta2", "gamma1", "gamma2"};
  }
};

/// Subtracts the unweighted mean of each channel's montage neighbors,
/// sample by sample. Every channel must have at least one neighbor.
inline RawRecording surface_laplacian(const RawRecording& rec) {
  validate_recording(rec);
  std::map<std::string, Eigen::Index> index;
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c)
    index[rec.channel_names[static_cast<std::size_t>(c)]] = c;
  RawRecording out = rec;
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
    const std::string& name = rec.channel_names[static_cast<std::size_t>(c)];
    auto it = rec.montage.find(name);
    if (it == rec.montage.end() || it->second.empty())
      throw validation_error("surface laplacian: channel '" + name +
                             "' has no montage neighbors");
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(rec.n_samples());
    for (const std::string& neighbor : it->second)
      mean += rec.samples.row(index.at(neighbor));
    mean /= static_cast<double>(it->second.size());
    out.samples.row(c) = rec.samples.row(c) - mean;
  }
  return out;
}

namespace detail {

inline Eigen::VectorXd hann_window(Eigen::Index n) {
  Eigen::VectorXd window(n);
  for (Eigen::Index i = 0; i < n; ++i)
    window(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                      static_cast<double>(i) /
                                      static_cast<double>(n - 1)));
  return window;
}

/// One-sided real DFT via FFTW. Plan creation is serialized; execution is
/// thread-safe.
inline std::vector<std::complex<double>> real_dft(const Eigen::VectorXd& x) {
  static std::mutex plan_mutex;
  const int n = static_cast<int>(x.size());
  std::vector<double> input(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> output(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_r2c_1d(
        n, input.data(), reinterpret_cast<fftw_complex*>(output.data()),
        FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw solver_error("FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  return output;
}

}  // namespace detail

/// Hanning-windowed log-bandpower of one segment. The segment is windowed,
/// transformed, and |coefficient|^2 summed over the one-sided bins whose
/// center frequency falls in each band (off-DC/Nyquist bins counted twice).
/// Powers are normalized by segment length and window energy so that a
/// full-spectrum band set recovers the windowed-signal energy, then floored
/// and logged.
inline Eigen::VectorXd log_bandpower(const Eigen::VectorXd& segment,
                                     double sample_rate,
                                     const BandSpec& bands) {
  require(segment.size() >= 2, "bandpower: segment too short");
  require(sample_rate > 0.0, "bandpower: sample rate must be positive");
  bands.validate(sample_rate);
  const Eigen::Index n = segment.size();
  const Eigen::VectorXd window = detail::hann_window(n);
  const double window_energy = window.squaredNorm();
  const Eigen::VectorXd windowed = segment.cwiseProduct(window);
  const auto spectrum = detail::real_dft(windowed);

  Eigen::VectorXd result(static_cast<Eigen::Index>(bands.size()));
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto [low, high] = bands.bands[b];
    double power = 0.0;
    bool hit = false;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      const double freq =
          static_cast<double>(k) * sample_rate / static_cast<double>(n);
      if (freq < low || freq >= high) continue;
      hit = true;
      const bool unique_bin =
          k == 0 || (n % 2 == 0 && k == spectrum.size() - 1);
      power += (unique_bin ? 1.0 : 2.0) * std::norm(spectrum[k]);
    }
    if (!hit) {
      throw validation_error(
          "bandpower: band [" + std::to_string(low) + ", " +
          std::to_string(high) + ") contains no DFT bin at " +
          std::to_string(n) + " samples, " + std::to_string(sample_rate) +
          " Hz");
    }
    power /= static_cast<double>(n) * window_energy;
    result(static_cast<Eigen::Index>(b)) = std::log(power + kPowerFloor);
  }
  return result;
}

/// Log-bandpower features for one trial window, one row per channel in
/// channel_names order. The window [start, end) is in seconds.
inline Eigen::MatrixXd extract_trial_features(
    const RawRecording& rec, std::pair<double, double> window_seconds,
    const BandSpec& bands) {
  validate_recording(rec);
  const auto [start, end] = window_seconds;
  const Eigen::Index first =
      static_cast<Eigen::Index>(std::llround(start * rec.sample_rate));
  const Eigen::Index last =
      static_cast<Eigen::Index>(std::llround(end * rec.sample_rate));
  require(first >= 0 && last <= rec.n_samples() && last - first >= 2,
          "feature window [" + std::to_string(start) + ", " +
              std::to_string(end) + ") s out of recording range");
  Eigen::MatrixXd features(rec.n_channels(),
                           static_cast<Eigen::Index>(bands.size()));
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
    const Eigen::VectorXd segment =
        rec.samples.row(c).segment(first, last - first).transpose();
    features.row(c) = log_bandpower(segment, rec.sample_rate, bands)
                          .transpose();
  }
  return features;
}

}  // namespace mtreg

#endif  // MTREG_FEATURES_HPP
