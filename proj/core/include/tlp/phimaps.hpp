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

#include <vector>

#include "tlp/params.hpp"

namespace tlp {

inline constexpr double kDefaultTol = 1e-12;

// gamma, delta, phi0, phi1 at a given beta. c = 1/gamma and d = 1/delta.
struct BasicQuad {
  double gamma;
  double delta;
  double phi0;
  double phi1;
  double beta;
};

// The same quantities in logarithms, together with ln(c - 1) and ln(d - 1),
// which have closed forms free of cancellation:
//   c - 1 = Q+ / P-,  d - 1 = Q- / P+,
// where, with y = beta^rho,
//   P± = (1-k) y^2 + 2(1 ± k r) y + 1 + k,  Q± = (1+k) y^2 + 2(1 ± k r) y + 1 - k.
// Valid for every finite log_beta; nothing overflows.
struct LogQuad {
  double log_beta;
  double log_gamma;
  double log_delta;
  double log_phi0;
  double log_phi1;
  double log_c1;  // ln(c - 1)
  double log_d1;  // ln(d - 1)
};

LogQuad log_quad(const GameParams& p, double log_beta) noexcept;

// Throws RangeError if beta^rho leaves the double range, ValidationError for
// non-positive or non-finite beta.
BasicQuad basic_quad(const GameParams& p, double beta);

// ln beta solving phi0(beta) = e^{log_x}. Requires p in W.
double log_beta_from_log_phi0(const GameParams& p, double log_x, double tol = kDefaultTol);
double beta_from_phi0(const GameParams& p, double x, double tol = kDefaultTol);

double s_map(const GameParams& p, double x, double tol = kDefaultTol);
double s_inverse(const GameParams& p, double x, double tol = kDefaultTol);

// Quadruple at the beta of the orbit point e^{log_s}: its log_phi1 is
// ln s(e^{log_s}), its log_c1/log_d1 belong to the same orbit index.
LogQuad forward_quad(const GameParams& p, double log_s, double tol = kDefaultTol);

// Quadruple at the beta of s^{-1}(e^{log_s}); its log_phi0 is the previous
// orbit point. Uses phi0(1/beta) = 1/phi1(beta), so one root solve suffices.
LogQuad backward_quad(const GameParams& p, double log_s, double tol = kDefaultTol);

// Largest |rho ln s| kept in an SOrbit: beyond it beta^{2 rho} is not a double.
double orbit_log_limit(const GameParams& p) noexcept;

struct SOrbit {
  double center = 0.0;
  int i_neg = 0;  // orbit covers indices [-i_neg, i_pos]
  int i_pos = 0;
  int requested_neg = 0;
  int requested_pos = 0;
  bool truncated = false;
  std::vector<double> log_values;  // slot i + i_neg
  std::vector<double> log_beta;
  std::vector<double> log_c1;
  std::vector<double> log_d1;

  std::size_t slot(int i) const;
  double log_value(int i) const { return log_values[slot(i)]; }
  double value(int i) const;
  double c(int i) const;
  double d(int i) const;
};

// Two-sided orbit s_i(x), i in [-i_neg, i_pos], with c_i and d_i. Points whose
// linear value would overflow (see orbit_log_limit) are dropped and
// `truncated` is set; i_neg/i_pos then report what was reached.
SOrbit s_orbit(const GameParams& p, double x, int i_neg, int i_pos, double tol = kDefaultTol);

}  // namespace tlp
