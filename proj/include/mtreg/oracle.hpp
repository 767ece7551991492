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
// A deliberately plain numerical minimizer used as an independent oracle
// against the closed-form solvers. It sees the objective only through a
// callback (gradients by central differences unless supplied) and shares no
// code with the linear-algebra solve paths it is used to check.

#ifndef MTREG_ORACLE_HPP
#define MTREG_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "mtreg/common.hpp"

namespace mtreg {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline Eigen::VectorXd central_difference_gradient(const Objective& objective,
                                                   const Eigen::VectorXd& x,
                                                   double step_scale) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_scale * (1.0 + std::abs(x(i)));
    const double saved = probe(i);
    probe(i) = saved + h;
    const double up = objective(probe);
    probe(i) = saved - h;
    const double down = objective(probe);
    probe(i) = saved;
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace detail

/// Descent with Barzilai-Borwein steps and a halving backtracking
/// safeguard, run until the gradient norm is at most tol. Throws when the
/// iteration cap is reached or no descent direction can make progress while
/// the gradient is still above tol; an oracle that fails to converge is a
/// test failure, not an answer.
inline Eigen::VectorXd brute_force_minimize(const Objective& objective,
                                            const Eigen::VectorXd& init,
                                            double tol,
                                            const Gradient& gradient = {},
                                            int max_iter = 200000,
                                            double fd_step = 1e-5) {
  require(tol > 0.0, "minimizer: tolerance must be positive");
  auto grad_at = [&](const Eigen::VectorXd& x) {
    return gradient ? gradient(x)
                    : detail::central_difference_gradient(objective, x,
                                                          fd_step);
  };
  Eigen::VectorXd x = init;
  double value = objective(x);
  require(std::isfinite(value), "minimizer: objective not finite at init");
  Eigen::VectorXd grad = grad_at(x);
  Eigen::VectorXd prev_x, prev_grad;
  bool have_previous = false;

  // Non-monotone acceptance window: steps are measured against the worst of
  // the last few values, with an allowance for rounding noise in the
  // objective, so Barzilai-Borwein steps pass even when the decrease is no
  // longer resolvable in double precision and progress rides on the
  // gradient alone.
  constexpr std::size_t kWindow = 10;
  std::vector<double> recent{value};

  for (int iter = 0; iter < max_iter; ++iter) {
    const double grad_norm = grad.norm();
    if (grad_norm <= tol) return x;

    double step = 1.0 / std::max(1.0, grad_norm);
    if (have_previous) {
      const Eigen::VectorXd s = x - prev_x;
      const Eigen::VectorXd q = grad - prev_grad;
      const double sq = s.dot(q);
      if (sq > 0.0) step = std::clamp(s.squaredNorm() / sq, 1e-14, 1e14);
    }

    const double reference = *std::max_element(recent.begin(), recent.end());
    const double noise = 16.0 * 2.2e-16 * (1.0 + std::abs(reference));
    Eigen::VectorXd candidate;
    double candidate_value = value;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 64; ++backtrack) {
      candidate = x - step * grad;
      candidate_value = objective(candidate);
      if (std::isfinite(candidate_value) &&
          candidate_value <=
              reference - 1e-4 * step * grad_norm * grad_norm + noise &&
          (candidate - x).norm() > 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw solver_error("minimizer stalled at gradient norm " +
                         std::to_string(grad_norm) + " (requested " +
                         std::to_string(tol) + ")");
    }
    prev_x = std::move(x);
    prev_grad = std::move(grad);
    x = std::move(candidate);
    value = candidate_value;
    recent.push_back(value);
    if (recent.size() > kWindow) recent.erase(recent.begin());
    grad = grad_at(x);
    have_previous = true;
  }
  throw solver_error("minimizer iteration cap reached");
}

}  // namespace mtreg

#endif  // MTREG_ORACLE_HPP
