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

#include <functional>
#include <vector>

#include "tlp/params.hpp"
#include "tlp/phimaps.hpp"

namespace tlp {

// A finite window [lo, hi] of an explicit ABMN(kappa, rho) solution with
// central ratio x. Indices are trail sites. Storage is by slot:
//   increments  m_{i,i+1}, n_{i+1,i}   for i in [lo, hi-1]
//   stakes a_i, b_i                    for i in [lo+1, hi-1]
//   cumulative m_i, n_i and phi_i      for i in [lo, hi] (phi from lo+1)
// Cumulative values are anchored at m_{-inf} = 0 and n_{+inf} = 0; the parts
// of the series outside the window are summed to negligible size and stored
// as m[lo] and n[hi].
class AbmnWindow {
 public:
  AbmnWindow(GameParams params, double x) : params_(params), x_(x) {}

  const GameParams& params() const noexcept { return params_; }
  double x() const noexcept { return x_; }
  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return hi_; }
  int requested_half_len() const noexcept { return requested_half_len_; }
  bool truncated() const noexcept { return truncated_; }
  int battlefield() const noexcept { return battlefield_; }
  double scale() const noexcept { return scale_; }

  double log_m_inc(int i) const;  // ln m_{i,i+1}
  double log_n_inc(int i) const;  // ln n_{i+1,i}
  double log_a(int i) const;
  double log_b(int i) const;
  double a(int i) const;
  double b(int i) const;
  double m(int i) const;
  double n(int i) const;
  double phi(int i) const;  // n_{i,i-1} / m_{i-1,i}

  double m_inf_total() const noexcept { return m_inf_total_; }
  double n_neg_inf_total() const noexcept { return n_neg_inf_total_; }
  double margin() const noexcept { return n_neg_inf_total_ / m_inf_total_; }
  // Relative bound on the omitted part of either boundary total.
  double tail_bound() const noexcept { return tail_bound_; }

  // Overwrites a stake pair; used to probe residual sensitivity.
  void set_stakes(int i, double a, double b);

 private:
  friend AbmnWindow default_solution(const GameParams&, double, int);
  friend AbmnWindow standard_solution(const GameParams&, double, int);
  friend AbmnWindow role_reversed(const AbmnWindow&);

  GameParams params_;
  double x_;
  int lo_ = 0;
  int hi_ = 0;
  int requested_half_len_ = 0;
  bool truncated_ = false;
  int battlefield_ = 0;
  double scale_ = 1.0;
  std::vector<double> log_m_inc_, log_n_inc_;
  std::vector<double> log_a_, log_b_;
  std::vector<double> m_, n_;
  std::vector<double> phi_;
  double m_inf_total_ = 0.0;
  double n_neg_inf_total_ = 0.0;
  double tail_bound_ = 0.0;
};

// Default normalization m_0 - m_{-1} = kappa on [-half_len, half_len]. When
// the orbit leaves the double range (kappa = 1 sends it off doubly
// exponentially at rho = 1) the window shrinks and truncated() is set.
AbmnWindow default_solution(const GameParams& p, double x, int half_len);

// The default window rescaled so that m_inf_total() == 1.
AbmnWindow standard_solution(const GameParams& p, double x, int half_len);

// (a, b, m, n)(i) -> (b, a, n, m)(-i).
AbmnWindow role_reversed(const AbmnWindow& w);

// Max over interior sites and the four equations of |L - R| / (|L| + |R|).
double abmn_residuals(const AbmnWindow& w);
// The same measure at one interior site.
double abmn_residual_at(const AbmnWindow& w, int i);

// Unique k with s_k(x) in the central domain.
int battlefield_index(const GameParams& p, double x, double tol = kDefaultTol);

struct MarginEval {
  double margin = 0.0;
  double sum_m = 0.0;  // default normalization
  double sum_n = 0.0;
  double bound = 0.0;  // omitted tails plus a per-term rounding allowance
  int steps_neg = 0;
  int steps_pos = 0;
};

inline constexpr double kMarginTol = 1e-14;

MarginEval mina_margin_eval(const GameParams& p, double x, double rel_tol = kMarginTol,
                            int min_half_len = 0);
double mina_margin(const GameParams& p, double x, double rel_tol = kMarginTol);

// Ratio of partial sums over the centre pair (m_0 - m_{-1}, n_{-1} - n_0), the
// k increments above it and the j below it. With j = k the window is mirror
// symmetric, so the value at 1/x is the reciprocal of the value at x.
double finite_margin(const GameParams& p, double x, int j, int k);

struct LambdaMaxOptions {
  int mesh_size = 512;
  double rel_tol = kMarginTol;
  double x_tol = 1e-10;
  int min_half_len = 60;
  bool find_roots = false;
  unsigned threads = 0;
};

struct MarginScan {
  double kappa = 0.0;
  double rho = 0.0;
  std::vector<double> grid;
  std::vector<double> margin;
  double lambda_max = 1.0;
  double argmax_x = 1.0;
  std::vector<double> roots_of_one;
  double bound = 0.0;       // largest relative tail bound seen
  int truncation = 0;       // largest half-length used on either side
};

MarginScan lambda_max(const GameParams& p, const LambdaMaxOptions& opts = {});

// Sign changes of finite_margin - 1 on (x_lo, x_hi), refined by bisection and
// merged within a relative 1e-8.
std::vector<double> margin_roots(const GameParams& p, int j, int k, double x_lo, double x_hi,
                                 int mesh = 4096);

// Minimum of lambda_max - 1 along a one-parameter family t -> (kappa, rho):
// the deepest interior local minimum of a coarse grid, refined by golden
// section between its grid neighbours. Falls back to the grid minimum when
// the grid has no interior local minimum.
struct DipSearch {
  double argmin = 0.0;
  double excess = 0.0;      // lambda_max - 1 at argmin
  double bound = 0.0;       // certified truncation bound there
  double argmax_x = 0.0;
  double bracket_lo = 0.0;  // coarse mesh neighbours of the minimum
  double bracket_hi = 0.0;
  bool within_bound = false;
  std::vector<double> t_grid;
  std::vector<double> excess_grid;
};

DipSearch lambda_dip(const std::function<GameParams(double)>& family, double t_lo,
                     double t_hi, int coarse, double t_tol, const LambdaMaxOptions& opts);

struct AsymptoticOptions {
  int i_eval = 200;
  int fit_from = 150;
  int fit_to = 250;
};

struct AsymptoticFit {
  int i_eval = 0;
  double ratio = 0.0;             // n_{-i,-i-1} / m_{-i-1,-i}
  double ratio_predicted = 0.0;
  double ratio_normalized = 0.0;  // ratio / predicted
  double stake_ratio = 0.0;       // b_{-i} / a_{-i}
  double stake_ratio_normalized = 0.0;
  double rate = 0.0;              // fitted slope of ln m_{-i-1,-i} in i
  double rate_expected = 0.0;     // ln((1-k)/(1+k))
  double rate_rel_err = 0.0;
  // kappa = 1, rho < 1 only: coefficient of i^2 in ln m_{i,i+1}.
  double quad_rate = 0.0;
  double quad_rate_expected = 0.0;
};

AsymptoticFit asymptotic_fit(const AbmnWindow& w, const AsymptoticOptions& opts = {});

}  // namespace tlp
