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

#ifndef MTREG_COMMON_HPP
#define MTREG_COMMON_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace mtreg {

/// Base class of everything this library throws on purpose.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, dimension mismatches, invalid labels,
/// infeasible requests. Maps to CLI exit code 1.
class validation_error : public error {
 public:
  using error::error;
};

/// Numerical failure inside a solver: non-finite intermediates, failed
/// factorizations, iteration caps in places that promise convergence.
/// Maps to CLI exit code 2.
class solver_error : public error {
 public:
  using error::error;
};

/// Raised by the covariance update when the weight scatter has zero trace
/// (a single task, or all task weights identical). Callers typically hold
/// the previous covariance instead.
class degenerate_scatter_error : public solver_error {
 public:
  using solver_error::solver_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw validation_error(message);
}

/// Relative change between two arrays, used by all convergence checks:
/// ||a - b|| / (1 + ||b||).
template <typename DerivedA, typename DerivedB>
double relative_change(const Eigen::MatrixBase<DerivedA>& updated,
                       const Eigen::MatrixBase<DerivedB>& previous) {
  return (updated - previous).norm() / (1.0 + previous.norm());
}

/// Runs body(i) for i in [0, count). Iterations must be independent and are
/// scheduled dynamically over a small thread pool; each iteration should
/// write only to its own output slot so results do not depend on scheduling.
/// The first exception thrown by any iteration is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& body) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t n_workers = std::min<std::size_t>(count, hw == 0 ? 4 : hw);
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mtreg

#endif  // MTREG_COMMON_HPP
