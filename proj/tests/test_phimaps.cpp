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

#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "tlp/abmn.hpp"
#include "tlp/error.hpp"
#include "tlp/phimaps.hpp"

using tlp::GameParams;

namespace {

const std::vector<GameParams>& param_grid() {
  static const std::vector<GameParams> grid = [] {
    std::vector<GameParams> g;
    for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      for (double r : {0.25, 0.5, 0.75, 1.0}) g.emplace_back(k, r);
    }
    g.emplace_back(0.25, 2.0);
    g.emplace_back(0.5, 1.4);
    return g;
  }();
  return grid;
}

}  // namespace

TEST_CASE("basic quad at kappa = rho = beta = 1") {
  const auto q = tlp::basic_quad(GameParams(1.0, 1.0), 1.0);
  CHECK(q.gamma == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(q.delta == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(q.phi0 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(q.phi1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(q.beta == 1.0);
}

TEST_CASE("phi0 at beta = 1 is (2 + kappa rho)/(2 - kappa rho)") {
  for (const GameParams& p : param_grid()) {
    const double kr = p.kappa() * p.rho();
    CHECK(tlp::basic_quad(p, 1.0).phi0 == doctest::Approx((2 + kr) / (2 - kr)).epsilon(1e-14));
  }
}

TEST_CASE("phi0 is asymptotic to beta at both ends") {
  const GameParams p(0.5, 1.0);
  CHECK(tlp::basic_quad(p, 1e8).phi0 / 1e8 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(tlp::basic_quad(p, 1e-8).phi0 / 1e-8 == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("log quad agrees with the direct formulas") {
  for (const GameParams& p : param_grid()) {
    for (double beta : {0.01, 0.3, 1.0, 2.5, 40.0}) {
      const auto q = tlp::basic_quad(p, beta);
      const auto l = tlp::log_quad(p, std::log(beta));
      CHECK(std::exp(l.log_gamma) == doctest::Approx(q.gamma).epsilon(1e-13));
      CHECK(std::exp(l.log_delta) == doctest::Approx(q.delta).epsilon(1e-13));
      CHECK(std::exp(l.log_phi0) == doctest::Approx(q.phi0).epsilon(1e-13));
      CHECK(std::exp(l.log_phi1) == doctest::Approx(q.phi1).epsilon(1e-13));
      // c - 1 and d - 1 against 1/gamma - 1 and 1/delta - 1
      CHECK(std::exp(l.log_c1) == doctest::Approx(1.0 / q.gamma - 1.0).epsilon(1e-12));
      CHECK(std::exp(l.log_d1) == doctest::Approx(1.0 / q.delta - 1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("basic quad input checks") {
  const GameParams p(1.0, 1.0);
  CHECK_THROWS_AS(tlp::basic_quad(p, 0.0), tlp::ValidationError);
  CHECK_THROWS_AS(tlp::basic_quad(p, -1.0), tlp::ValidationError);
  CHECK_THROWS_AS(tlp::basic_quad(p, std::nan("")), tlp::ValidationError);
  CHECK_THROWS_AS(tlp::basic_quad(p, std::numeric_limits<double>::infinity()),
                  tlp::ValidationError);
  CHECK_THROWS_AS(tlp::basic_quad(GameParams(0.01, 10.0), 1e40), tlp::RangeError);
}

TEST_CASE("beta from phi0 examples") {
  CHECK(tlp::beta_from_phi0(GameParams(1.0, 1.0), 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (const GameParams& p : param_grid()) {
    const double kr = p.kappa() * p.rho();
    CHECK(tlp::beta_from_phi0(p, (2 + kr) / (2 - kr)) == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("beta from phi0 round trip on [1e-4, 1e4]") {
  for (const GameParams& p : param_grid()) {
    for (int i = 0; i < 100; ++i) {
      const double x = std::pow(10.0, -4.0 + 8.0 * i / 99.0);
      const double beta = tlp::beta_from_phi0(p, x);
      CHECK(std::fabs(tlp::basic_quad(p, beta).phi0 - x) <= 1e-12 * x * 4);
    }
  }
}

TEST_CASE("beta from phi0 refuses parameters outside W") {
  CHECK_THROWS_AS(tlp::beta_from_phi0(GameParams(1.0, 1.5), 2.0), tlp::ValidationError);
}

TEST_CASE("shift map examples") {
  const GameParams p11(1.0, 1.0);
  CHECK(tlp::s_map(p11, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(tlp::s_inverse(p11, 1.0 / 3.0) == doctest::Approx(3.0).epsilon(1e-12));
  for (const GameParams& p : param_grid()) {
    const double kr = p.kappa() * p.rho();
    const double x = (2 + kr) / (2 - kr);
    CHECK(x * tlp::s_map(p, x) == doctest::Approx(1.0).epsilon(1e-11));
  }
  CHECK(tlp::s_map(GameParams(0.1, 1.0), 10.0) < 10.0);
}

TEST_CASE("shift map is sub-diagonal and inverted by 1/s(1/x)") {
  for (const GameParams& p : param_grid()) {
    for (double x : {1e-3, 0.2, 0.9, 1.0, 1.7, 12.0, 5e3}) {
      const double sx = tlp::s_map(p, x);
      CHECK(sx < x);
      CHECK(tlp::s_inverse(p, x) > x);
      CHECK(tlp::s_inverse(p, sx) == doctest::Approx(x).epsilon(10 * 1e-12 * 4));
      CHECK(tlp::s_map(p, tlp::s_inverse(p, x)) == doctest::Approx(x).epsilon(1e-11));
    }
  }
}

TEST_CASE("orbit at (1,1,3) with its coefficient maps") {
  const auto o = tlp::s_orbit(GameParams(1.0, 1.0), 3.0, 2, 2);
  CHECK(o.value(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(o.value(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(o.c(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(o.d(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("orbits are strictly decreasing in the index") {
  for (const GameParams& p : param_grid()) {
    const auto o = tlp::s_orbit(p, 1.3, 30, 30);
    for (int i = -o.i_neg; i < o.i_pos; ++i) {
      CHECK(o.log_value(i + 1) < o.log_value(i));
      // c - 1 and d - 1 underflow in linear terms far out; their logs stay finite.
      CHECK(std::isfinite(o.log_c1[o.slot(i)]));
      CHECK(std::isfinite(o.log_d1[o.slot(i)]));
    }
  }
}

TEST_CASE("orbit overflow truncates instead of failing") {
  const auto o = tlp::s_orbit(GameParams(1.0, 1.0), 3.0, 40, 40);
  CHECK(o.truncated);
  CHECK(o.i_neg < 40);
  CHECK(o.i_pos < 40);
  CHECK(o.requested_neg == 40);
  for (int i = -o.i_neg; i <= o.i_pos; ++i) {
    CHECK(std::isfinite(o.value(i)));
    CHECK(o.value(i) > 0.0);
  }
}

TEST_CASE("backward orbit grows linearly at rho = 1") {
  // s_{-i}(x) / i -> 8 kappa / (1 - kappa^2) with an O(log i) offset.
  const GameParams p(0.5, 1.0);
  const auto o = tlp::s_orbit(p, 1.0, 4000, 0);
  const double slope = 8.0 * 0.5 / (1.0 - 0.25);
  const double e500 = std::fabs(o.value(-500) / 500.0 / slope - 1.0);
  const double e4000 = std::fabs(o.value(-4000) / 4000.0 / slope - 1.0);
  CHECK(e4000 < e500);
  CHECK(e4000 < 0.01);
  // Successive differences settle on the slope itself.
  CHECK(o.value(-4000) - o.value(-3999) == doctest::Approx(slope).epsilon(1e-3));
}

TEST_CASE("phi0 and phi1 increase in beta and stay ordered") {
  for (const GameParams& p : param_grid()) {
    double prev0 = 0.0;
    double prev1 = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double beta = std::pow(10.0, -6.0 + 12.0 * i / 200.0);
      const auto q = tlp::basic_quad(p, beta);
      CHECK(q.phi0 > prev0);
      CHECK(q.phi1 > prev1);
      CHECK(q.phi0 > q.phi1);
      prev0 = q.phi0;
      prev1 = q.phi1;
    }
  }
}

TEST_CASE("small-kappa expansion of phi0") {
  for (double r : {0.25, 0.5, 0.75, 1.0}) {
    for (double k : {0.02, 0.01, 0.005}) {
      const GameParams p(k, r);
      for (double beta : {0.05, 0.5, 1.0, 3.0, 30.0}) {
        const double y = std::pow(beta, r);
        const double first = beta + 4.0 * r * beta * y / ((1 + y) * (1 + y)) * k;
        const double err = std::fabs(tlp::basic_quad(p, beta).phi0 - first);
        CHECK(err <= 2.0 * r * (1 + r) * beta * k * k);
      }
    }
  }
}

TEST_CASE("coefficient c has an O(kappa^2) remainder after its linear term") {
  for (double r : {0.5, 1.0}) {
    for (double x : {0.3, 1.0, 4.0}) {
      auto remainder = [&](double k) {
        const auto o = tlp::s_orbit(GameParams(k, r), x, 0, 0);
        const double xr = std::pow(x, r);
        const double lin = 2.0 * (1.0 - 2.0 * (1.0 + (1.0 - r) * xr) / ((1 + xr) * (1 + xr)));
        return std::fabs(o.c(0) - 2.0 - k * lin);
      };
      const double e1 = remainder(0.02);
      const double e2 = remainder(0.01);
      const double e3 = remainder(0.005);
      CAPTURE(r);
      CAPTURE(x);
      CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.1));
      CHECK(e3 / e2 == doctest::Approx(0.25).epsilon(0.1));
    }
  }
}

TEST_CASE("each orbit meets the central domain exactly once") {
  for (const GameParams& p : param_grid()) {
    if (!(p.kappa() * p.rho() < 2.0)) continue;
    const auto dom = tlp::central_domain(p);
    for (double x : {0.05, 0.4, 1.0, 2.0, 9.0}) {
      const int bf = tlp::battlefield_index(p, x);
      if (std::abs(bf) > 50) continue;
      const auto o = tlp::s_orbit(p, x, 60, 60);
      int hits = 0;
      int where = 0;
      for (int i = -o.i_neg; i <= o.i_pos; ++i) {
        if (dom.contains(o.value(i))) {
          ++hits;
          where = i;
        }
      }
      CAPTURE(p.to_string());
      CAPTURE(x);
      CHECK(hits == 1);
      CHECK(where == bf);
    }
  }
}
