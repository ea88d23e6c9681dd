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

namespace tlp {

inline constexpr double kQuadTol = 1e-10;

// H(z) = z + 2 ln z - 1/z, an increasing bijection (0, inf) -> R.
double h_func(double z);
// Evaluated through w = ln z, where H = 2 sinh w + 2 w.
double h_func_log(double w) noexcept;
// ln H^{-1}(y). Never overflows for finite y.
double h_inverse_log(double y, double tol = 1e-15);
double h_inverse(double y, double tol = 1e-15);

struct FlowEval {
  double rho;
  double x;
  double u;
  double s_value;  // S_rho(x, u)
  double j_value;  // S_rho(x, u)^rho
  double log_j;
};

// S_rho(x, u) from the implicit relation H(J) = H(x^rho) - 8 rho^2 u.
FlowEval flow(double rho, double x, double u, double tol = 1e-15);

struct OdePairEval {
  double rho;
  double x;
  double r;
  double f;
  double g;
  double a;
  double b;
  double log_f;
  double log_g;
  double quadrature_error;  // estimated absolute error in ln f plus ln g
};

// f, g by adaptive Gauss-Kronrod quadrature of the log-derivatives along the
// flow; a, b assembled from f, g.
OdePairEval ode_pair(double rho, double x, double r, double tol = kQuadTol);

struct PrizeTotals {
  double rho;
  double x;
  double m_total;  // integral of f over R
  double n_total;  // integral of g over R
  double window;   // integrals taken over [v - T, v + T]
  double tail_bound;
};

PrizeTotals prize_totals(double rho, double x, double tol = kQuadTol);

// The unique v with S_rho(x, v) = 1:
//   8 rho v = 2 ln x + (x^rho - x^{-rho}) / rho.
double battlefield_point(double rho, double x);

// (1 - J) / (1 + J), J = S_rho(1, u)^rho; odd in u.
double drift(double rho, double u);

struct DecayFit {
  double rho;
  double u_lo;
  double u_hi;
  bool window_shrunk;
  double zeta_f, zeta_g, zeta_a, zeta_b;  // fitted exponents
  // Same fits with the next-order terms ln(u)/u and 1/u as extra regressors.
  double zeta_f_corrected, zeta_g_corrected, zeta_a_corrected, zeta_b_corrected;
  double expected_f, expected_g, expected_a, expected_b;
};

// Fits ln h(1, u) + 2u against zeta ln u on [20, 60] for h in {f, g, a, b}.
// For small rho the ln(u)/u corrections bias the plain slope by several
// percent on this window; the corrected fields remove most of that.
DecayFit decay_check(double rho, double u_lo = 20.0, double u_hi = 60.0, int points = 41);

}  // namespace tlp
