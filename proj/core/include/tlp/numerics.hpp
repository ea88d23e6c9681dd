/*
 * Copyright 2026 The lostpennies Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "tlp/error.hpp"

namespace tlp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(e^a + e^b), exact when either argument is -inf.
inline double log_add(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// ln(A e^{2t} + B e^t + C) for non-negative A, B, C, not all zero. Terms with
// a zero coefficient are skipped, so the result stays finite for any finite t.
inline double log_quadratic(double A, double B, double C, double t) noexcept {
  double acc = kNegInf;
  if (A > 0.0) acc = log_add(acc, std::log(A) + 2.0 * t);
  if (B > 0.0) acc = log_add(acc, std::log(B) + t);
  if (C > 0.0) acc = log_add(acc, std::log(C));
  return acc;
}

// Root of a monotone function on [lo, hi] with f(lo) and f(hi) of opposite
// sign. Stops when the bracket is narrower than abs_tol plus a few ulps of
// the larger endpoint. Boost's TOMS 748 does the work.
template <class F>
double bracket_root(F&& f, double lo, double hi, double abs_tol,
                    std::uintmax_t max_iter = 200) {
  auto done = [abs_tol](double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(b - a) <= abs_tol + 8.0 * std::numeric_limits<double>::epsilon() * scale;
  };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw ConvergenceError("bracket_root: endpoints do not straddle a root");
  }
  std::uintmax_t iters = max_iter;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  if (iters >= max_iter && !done(a, b)) {
    throw ConvergenceError("bracket_root: iteration budget exhausted");
  }
  return 0.5 * (a + b);
}

struct GoldenResult {
  double x;
  double fx;
};

// Maximize a unimodal f on [a, b] by golden-section search until the bracket
// is narrower than tol.
GoldenResult golden_max(const std::function<double(double)>& f, double a, double b,
                        double tol);

// Pairwise (cascade) summation. The result depends only on the order of the
// input, never on how it was produced.
double pairwise_sum(std::span<const double> xs) noexcept;

// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope;
  double intercept;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Worker count: TLP_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
unsigned thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 means
// thread_count()). Each index is processed exactly once; body must only write
// to slot i of any shared output. The first exception thrown by any worker is
// rethrown on the caller's thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace tlp
