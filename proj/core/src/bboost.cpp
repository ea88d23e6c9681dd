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

#include "tlp/bboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "tlp/error.hpp"
#include "tlp/numerics.hpp"

namespace tlp {

namespace {

void check_rho_x(double rho, double x) {
  if (!std::isfinite(rho) || !(rho > 0.0)) throw ValidationError("rho must be finite and > 0");
  if (!std::isfinite(x) || !(x > 0.0)) throw ValidationError("x must be finite and > 0");
}

// 2 (1 + (1-rho) J) / (1+J)^2 and 2 ((1-rho) J + J^2) / (1+J)^2, written so
// that neither overflows for large J.
double weight_f(double rho, double log_j) {
  if (log_j <= 0.0) {
    const double j = std::exp(log_j);
    return 2.0 * (1.0 + (1.0 - rho) * j) / ((1.0 + j) * (1.0 + j));
  }
  const double t = std::exp(-log_j);
  return 2.0 * (t * t + (1.0 - rho) * t) / ((1.0 + t) * (1.0 + t));
}

double weight_g(double rho, double log_j) {
  if (log_j <= 0.0) {
    const double j = std::exp(log_j);
    return 2.0 * ((1.0 - rho) * j + j * j) / ((1.0 + j) * (1.0 + j));
  }
  const double t = std::exp(-log_j);
  return 2.0 * ((1.0 - rho) * t + 1.0) / ((1.0 + t) * (1.0 + t));
}

struct Integral {
  double value;
  double error;
};

// Signed integral over [a, b] (either order) with Gauss-Kronrod 61. The
// target is tol * max(1, L1): absolute for small integrals, relative for
// large ones. Boost only takes a relative target, and on very short
// intervals its one-pass estimate sits near 1e-15 absolute; asking it to
// recurse below that returns a meaningless estimate, so one pass is tried
// first.
template <class F>
Integral gk_integral(F&& fn, double a, double b, double tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (a == b) return {0.0, 0.0};
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  double err = 0.0;
  double l1 = 0.0;
  double v = GK::integrate(fn, lo, hi, 0, 0.0, &err, &l1);
  if (!(err <= tol * std::max(1.0, l1)) && std::isfinite(v)) {
    const double rel = l1 > 0.0 ? tol * std::max(1.0, l1) / l1 : tol;
    v = GK::integrate(fn, lo, hi, 20, rel, &err, &l1);
  }
  if (!(err <= 10.0 * tol * std::max(1.0, l1)) || !std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature on [" << lo << ", " << hi << "] stopped with error estimate " << err
       << " (L1 norm " << l1 << ", tol " << tol << ")";
    throw ConvergenceError(os.str());
  }
  return {a < b ? v : -v, err};
}

// ln f(x, r1) - ln f(x, r0) and ln g(x, r1) - ln g(x, r0).
struct LogIncrements {
  double df;
  double dg;
  double error;
};

LogIncrements log_increments(double rho, double x, double r0, double r1, double tol) {
  const double h0 = h_func_log(rho * std::log(x));
  const double c = 8.0 * rho * rho;
  auto phi_f = [&](double u) { return 2.0 * (1.0 - weight_f(rho, h_inverse_log(h0 - c * u))); };
  auto phi_g = [&](double u) { return -2.0 * (1.0 - weight_g(rho, h_inverse_log(h0 - c * u))); };
  const Integral If = gk_integral(phi_f, r0, r1, tol);
  const Integral Ig = gk_integral(phi_g, r0, r1, tol);
  return {If.value, Ig.value, If.error + Ig.error};
}

// Least-squares slope on ln u with intercept, ln(u)/u and 1/u also fitted.
double corrected_slope(const std::vector<double>& lu, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(lu.size());
  if (n < 4) return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = lu[static_cast<std::size_t>(i)];
    const double inv_u = std::exp(-l);
    A(i, 0) = 1.0;
    A(i, 1) = l;
    A(i, 2) = l * inv_u;
    A(i, 3) = inv_u;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  return A.colPivHouseholderQr().solve(rhs)(1);
}

void assemble_ab(double rho, double lf, double lg, double& la, double& lb) {
  la = std::log(2.0 * rho) + (1.0 + rho) * lf + rho * lg - 2.0 * log_add(rho * lf, rho * lg);
  lb = la + lg - lf;
}

}  // namespace

double h_func_log(double w) noexcept { return 2.0 * std::sinh(w) + 2.0 * w; }

double h_func(double z) {
  if (!std::isfinite(z) || !(z > 0.0)) throw ValidationError("h_func: z must be finite and > 0");
  return z + 2.0 * std::log(z) - 1.0 / z;
}

double h_inverse_log(double y, double tol) {
  if (std::isnan(y)) throw ValidationError("h_inverse: y is NaN");
  if (y == 0.0) return 0.0;
  const double ay = std::fabs(y);
  // 2 sinh w + 2 w = |y| has its root in [asinh(|y|/4), asinh(|y|/2)].
  const double lo = std::asinh(ay / 4.0);
  const double hi = std::asinh(ay / 2.0);
  auto f = [ay](double w) {
    return std::make_pair(2.0 * std::sinh(w) + 2.0 * w - ay, 2.0 * std::cosh(w) + 2.0);
  };
  const int digits = std::min(52, static_cast<int>(-std::log2(std::max(tol, 1e-16))) + 2);
  std::uintmax_t iters = 100;
  const double w = boost::math::tools::newton_raphson_iterate(f, 0.5 * (lo + hi), lo, hi, digits,
                                                              iters);
  return y > 0.0 ? w : -w;
}

double h_inverse(double y, double tol) { return std::exp(h_inverse_log(y, tol)); }

FlowEval flow(double rho, double x, double u, double tol) {
  check_rho_x(rho, x);
  if (!std::isfinite(u)) throw ValidationError("flow: u must be finite");
  const double lj = h_inverse_log(h_func_log(rho * std::log(x)) - 8.0 * rho * rho * u, tol);
  return {rho, x, u, std::exp(lj / rho), std::exp(lj), lj};
}

OdePairEval ode_pair(double rho, double x, double r, double tol) {
  check_rho_x(rho, x);
  if (!std::isfinite(r)) throw ValidationError("ode_pair: r must be finite");
  const LogIncrements d = log_increments(rho, x, 0.0, r, tol);
  OdePairEval e;
  e.rho = rho;
  e.x = x;
  e.r = r;
  e.log_f = d.df;
  e.log_g = std::log(x) + d.dg;
  e.f = std::exp(e.log_f);
  e.g = std::exp(e.log_g);
  double la, lb;
  assemble_ab(rho, e.log_f, e.log_g, la, lb);
  e.a = std::exp(la);
  e.b = std::exp(lb);
  e.quadrature_error = d.error;
  return e;
}

PrizeTotals prize_totals(double rho, double x, double tol) {
  check_rho_x(rho, x);
  const double v = battlefield_point(rho, x);
  const OdePairEval at_v = ode_pair(rho, x, v, tol);
  const double inner_tol = std::max(tol * 1e-2, 1e-14);
  auto lf_lg = [&](double u) {
    const LogIncrements d = log_increments(rho, x, v, u, inner_tol);
    return std::make_pair(at_v.log_f + d.df, at_v.log_g + d.dg);
  };
  auto f_of = [&](double u) { return std::exp(lf_lg(u).first); };
  auto g_of = [&](double u) { return std::exp(lf_lg(u).second); };

  const double zeta = std::max({(1.0 + rho) / (2.0 * rho * rho), 0.0});
  PrizeTotals out{rho, x, 0.0, 0.0, 0.0, 0.0};
  for (double T = 8.0;; T *= 2.0) {
    const double m = gk_integral(f_of, v - T, v, tol * 1e-2).value +
                     gk_integral(f_of, v, v + T, tol * 1e-2).value;
    const double n = gk_integral(g_of, v - T, v, tol * 1e-2).value +
                     gk_integral(g_of, v, v + T, tol * 1e-2).value;
    // Tails decay like |u|^zeta e^{-2|u|}; integrate that envelope from T.
    const double lead = std::max(0.5, 2.0 - zeta / T);
    const auto [lf_hi, lg_hi] = lf_lg(v + T);
    const auto [lf_lo, lg_lo] = lf_lg(v - T);
    const double tail_m = (std::exp(lf_hi) + std::exp(lf_lo)) / lead;
    const double tail_n = (std::exp(lg_hi) + std::exp(lg_lo)) / lead;
    out.m_total = m;
    out.n_total = n;
    out.window = T;
    out.tail_bound = tail_m / m + tail_n / n;
    if (out.tail_bound < 0.1 * tol) return out;
    if (T > 4096.0) throw ConvergenceError("prize_totals: tails did not decay below tolerance");
  }
}

double battlefield_point(double rho, double x) {
  check_rho_x(rho, x);
  const double lx = std::log(x);
  return (2.0 * lx + 2.0 * std::sinh(rho * lx) / rho) / (8.0 * rho);
}

double drift(double rho, double u) {
  return -std::tanh(0.5 * flow(rho, 1.0, u).log_j);
}

DecayFit decay_check(double rho, double u_lo, double u_hi, int points) {
  if (!(rho > 0.0) || !(u_lo > 0.0) || !(u_lo < u_hi) || points < 3) {
    throw ValidationError("decay_check: need rho > 0, 0 < u_lo < u_hi, points >= 3");
  }
  DecayFit out{};
  out.rho = rho;
  out.u_lo = u_lo;
  out.u_hi = u_hi;
  out.window_shrunk = false;
  std::vector<double> lu, yf, yg, ya, yb;
  for (int i = 0; i < points; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / (points - 1);
    const OdePairEval e = ode_pair(rho, 1.0, u);
    double la, lb;
    assemble_ab(rho, e.log_f, e.log_g, la, lb);
    if (!std::isfinite(e.log_f) || !std::isfinite(e.log_g)) {
      out.window_shrunk = true;
      out.u_hi = u;
      break;
    }
    lu.push_back(std::log(u));
    yf.push_back(e.log_f + 2.0 * u);
    yg.push_back(e.log_g + 2.0 * u);
    ya.push_back(la + 2.0 * u);
    yb.push_back(lb + 2.0 * u);
  }
  out.zeta_f = fit_line(lu, yf).slope;
  out.zeta_g = fit_line(lu, yg).slope;
  out.zeta_a = fit_line(lu, ya).slope;
  out.zeta_b = fit_line(lu, yb).slope;
  out.zeta_f_corrected = corrected_slope(lu, yf);
  out.zeta_g_corrected = corrected_slope(lu, yg);
  out.zeta_a_corrected = corrected_slope(lu, ya);
  out.zeta_b_corrected = corrected_slope(lu, yb);
  out.expected_f = (1.0 + rho) / (2.0 * rho * rho);
  out.expected_g = (1.0 - rho) / (2.0 * rho * rho);
  out.expected_a = out.expected_f - 1.0;
  out.expected_b = out.expected_g - 1.0;
  return out;
}

}  // namespace tlp
