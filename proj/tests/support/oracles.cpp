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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tlp::testing {

namespace {

double rhs(double rho, double ls) {
  const double c = std::cosh(0.5 * rho * ls);
  return -2.0 * rho / (c * c);
}

double rk4_step(double rho, double ls, double h) {
  const double k1 = rhs(rho, ls);
  const double k2 = rhs(rho, ls + 0.5 * h * k1);
  const double k3 = rhs(rho, ls + 0.5 * h * k2);
  const double k4 = rhs(rho, ls + h * k3);
  return ls + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

}  // namespace

double rk4_log_flow(double rho, double x, double u, double tol) {
  double ls = std::log(x);
  if (u == 0.0) return ls;
  const double dir = u > 0.0 ? 1.0 : -1.0;
  double t = 0.0;
  double h = 1e-3;
  int guard = 0;
  while (dir * (u - t) > 0.0) {
    if (++guard > 50'000'000) throw std::runtime_error("rk4_log_flow: too many steps");
    h = std::min(h, std::fabs(u - t));
    const double full = rk4_step(rho, ls, dir * h);
    const double half = rk4_step(rho, rk4_step(rho, ls, 0.5 * dir * h), 0.5 * dir * h);
    const double err = std::fabs(full - half) / 15.0;
    if (err <= tol * std::max(1.0, std::fabs(half)) || h < 1e-12) {
      ls = half + (half - full) / 15.0;
      t += dir * h;
      h *= err > 0.0 ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 4.0) : 4.0;
    } else {
      h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.9);
    }
  }
  return ls;
}

ClosedFormFG closed_form_fg(double rho, double x, double r) {
  const double lj0 = rho * std::log(x);
  const double lj = rho * rk4_log_flow(rho, x, r);
  auto gf = [rho](double l) { return std::exp(l) + std::exp(-l) + 2.0 * rho * l; };
  auto gg = [rho](double l) { return -std::exp(l) - std::exp(-l) + 2.0 * rho * l; };
  const double s = 4.0 * rho * rho;
  return {-(gf(lj) - gf(lj0)) / s, std::log(x) + (gg(lj) - gg(lj0)) / s};
}

GridMax grid_argmax(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
  GridMax best{lo, f(lo), 0};
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    const double v = f(x);
    if (v > best.fx) best = {x, v, i};
  }
  return best;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace tlp::testing
