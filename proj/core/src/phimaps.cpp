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

#include "tlp/phimaps.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

#include "tlp/error.hpp"
#include "tlp/numerics.hpp"

namespace tlp {

namespace {

double softplus(double t) noexcept {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void check_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    std::ostringstream os;
    os << what << " must be finite and > 0, got " << v;
    throw ValidationError(os.str());
  }
}

}  // namespace

LogQuad log_quad(const GameParams& p, double log_beta) noexcept {
  const double k = p.kappa();
  const double kr = k * p.rho();
  const double t = p.rho() * log_beta;
  const double lpp = log_quadratic(1.0 - k, 2.0 * (1.0 + kr), 1.0 + k, t);
  const double lpm = log_quadratic(1.0 - k, 2.0 * (1.0 - kr), 1.0 + k, t);
  const double lqp = log_quadratic(1.0 + k, 2.0 * (1.0 + kr), 1.0 - k, t);
  const double lqm = log_quadratic(1.0 + k, 2.0 * (1.0 - kr), 1.0 - k, t);
  const double l2y = std::log(2.0) + 2.0 * softplus(t);
  LogQuad q;
  q.log_beta = log_beta;
  q.log_gamma = lpm - l2y;
  q.log_delta = lpp - l2y;
  q.log_phi0 = log_beta + lpp - lpm;
  q.log_phi1 = log_beta + lqm - lqp;
  q.log_c1 = lqp - lpm;
  q.log_d1 = lqm - lpp;
  return q;
}

BasicQuad basic_quad(const GameParams& p, double beta) {
  check_positive(beta, "beta");
  const double lb = std::log(beta);
  if (std::fabs(p.rho() * lb) > std::log(DBL_MAX)) {
    std::ostringstream os;
    os << "beta^rho out of floating range for beta=" << beta << ", rho=" << p.rho();
    throw RangeError(os.str(), p.rho() * lb);
  }
  const LogQuad q = log_quad(p, lb);
  return {std::exp(q.log_gamma), std::exp(q.log_delta), std::exp(q.log_phi0),
          std::exp(q.log_phi1), beta};
}

double log_beta_from_log_phi0(const GameParams& p, double log_x, double tol) {
  require_regime(p, Regime::Algebraic, "beta_from_phi0");
  if (!std::isfinite(log_x)) throw ValidationError("beta_from_phi0: x must be finite and > 0");
  if (!(tol > 0.0)) throw ValidationError("beta_from_phi0: tol must be > 0");
  auto f = [&](double lb) { return log_quad(p, lb).log_phi0 - log_x; };
  // phi0(beta) >= beta, so ln x is an upper end of the bracket.
  const double hi = log_x;
  double step = 1.0;
  double lo = log_x - step;
  int doublings = 0;
  while (f(lo) > 0.0) {
    if (++doublings > 200) {
      throw ConvergenceError("beta_from_phi0: bracket growth exceeded 200 doublings");
    }
    step *= 2.0;
    lo = log_x - step;
  }
  return bracket_root(f, lo, hi, 0.25 * tol);
}

double beta_from_phi0(const GameParams& p, double x, double tol) {
  check_positive(x, "x");
  return std::exp(log_beta_from_log_phi0(p, std::log(x), tol));
}

LogQuad forward_quad(const GameParams& p, double log_s, double tol) {
  return log_quad(p, log_beta_from_log_phi0(p, log_s, tol));
}

LogQuad backward_quad(const GameParams& p, double log_s, double tol) {
  return log_quad(p, -log_beta_from_log_phi0(p, -log_s, tol));
}

double s_map(const GameParams& p, double x, double tol) {
  check_positive(x, "x");
  return std::exp(forward_quad(p, std::log(x), tol).log_phi1);
}

double s_inverse(const GameParams& p, double x, double tol) {
  check_positive(x, "x");
  return 1.0 / s_map(p, 1.0 / x, tol);
}

double orbit_log_limit(const GameParams& p) noexcept {
  return 0.5 * std::log(DBL_MAX) / p.rho();
}

std::size_t SOrbit::slot(int i) const {
  if (i < -i_neg || i > i_pos) {
    std::ostringstream os;
    os << "orbit index " << i << " outside [" << -i_neg << ", " << i_pos << "]";
    throw RangeError(os.str(), static_cast<double>(i));
  }
  return static_cast<std::size_t>(i + i_neg);
}

double SOrbit::value(int i) const { return std::exp(log_value(i)); }
double SOrbit::c(int i) const { return 1.0 + std::exp(log_c1[slot(i)]); }
double SOrbit::d(int i) const { return 1.0 + std::exp(log_d1[slot(i)]); }

SOrbit s_orbit(const GameParams& p, double x, int i_neg, int i_pos, double tol) {
  require_regime(p, Regime::Algebraic, "s_orbit");
  check_positive(x, "x");
  if (i_neg < 0 || i_pos < 0) throw ValidationError("s_orbit: index counts must be >= 0");
  const double limit = orbit_log_limit(p);
  const double lx = std::log(x);

  std::vector<LogQuad> back;
  bool truncated = false;
  double cur = lx;
  for (int i = 1; i <= i_neg; ++i) {
    const LogQuad q = backward_quad(p, cur, tol);
    if (std::fabs(q.log_phi0) > limit) {
      truncated = true;
      break;
    }
    back.push_back(q);
    cur = q.log_phi0;
  }
  std::vector<LogQuad> fwd;
  cur = lx;
  LogQuad q = forward_quad(p, cur, tol);
  fwd.push_back(q);
  for (int i = 1; i <= i_pos; ++i) {
    if (std::fabs(q.log_phi1) > limit) {
      truncated = true;
      break;
    }
    q = forward_quad(p, q.log_phi1, tol);
    fwd.push_back(q);
  }

  SOrbit o;
  o.center = x;
  o.requested_neg = i_neg;
  o.requested_pos = i_pos;
  o.truncated = truncated;
  o.i_neg = static_cast<int>(back.size());
  o.i_pos = static_cast<int>(fwd.size()) - 1;
  const std::size_t n = back.size() + fwd.size();
  o.log_values.reserve(n);
  o.log_beta.reserve(n);
  o.log_c1.reserve(n);
  o.log_d1.reserve(n);
  auto push = [&o](const LogQuad& e, double log_value) {
    o.log_values.push_back(log_value);
    o.log_beta.push_back(e.log_beta);
    o.log_c1.push_back(e.log_c1);
    o.log_d1.push_back(e.log_d1);
  };
  for (auto it = back.rbegin(); it != back.rend(); ++it) push(*it, it->log_phi0);
  double lv = lx;
  for (const LogQuad& e : fwd) {
    push(e, lv);
    lv = e.log_phi1;
  }
  return o;
}

}  // namespace tlp
