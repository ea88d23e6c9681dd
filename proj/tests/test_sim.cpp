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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "support/oracles.hpp"
#include "tlp/abmn.hpp"
#include "tlp/bboost.hpp"
#include "tlp/error.hpp"
#include "tlp/sim.hpp"

using tlp::GameParams;
using tlp::SimConfig;
using tlp::StakeProfile;

namespace {

SimConfig standard_config(const tlp::AbmnWindow& w, std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.m_neg_inf = 0.0;
  c.m_inf = w.m_inf_total();
  c.n_neg_inf = w.n_neg_inf_total();
  c.n_inf = 0.0;
  c.m_star = -1.0;
  c.n_star = -1.0;
  return c;
}

// Fraction of single turns from site 0 that move right.
double right_fraction(const GameParams& p, const StakeProfile& prof, long turns,
                      std::uint64_t seed) {
  SimConfig c;
  c.max_turns = 1;
  c.escape_radius = 10;
  c.seed = seed;
  long right = 0;
  for (long k = 0; k < turns; ++k) {
    tlp::Rng rng(tlp::mix_seed(seed, static_cast<std::uint64_t>(k)));
    if (tlp::play_tlp(p, prof, 0, c, rng).final_position == 1) ++right;
  }
  return static_cast<double>(right) / static_cast<double>(turns);
}

}  // namespace

TEST_CASE("rng streams are reproducible and well spread") {
  tlp::Rng a(42);
  tlp::Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 1000; ++k) seeds.insert(tlp::mix_seed(7, k));
  CHECK(seeds.size() == 1000);
  CHECK(tlp::mix_seed(7, 0) != tlp::mix_seed(8, 0));

  tlp::Rng r(3);
  const int n = 200000;
  double su = 0, sz = 0, sz2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    su += u;
    const double z = r.normal();
    sz += z;
    sz2 += z * z;
  }
  CHECK(std::fabs(su / n - 0.5) < 3 * std::sqrt(1.0 / 12 / n) + 1e-12);
  CHECK(std::fabs(sz / n) < 3 * std::sqrt(1.0 / n));
  CHECK(std::fabs(sz2 / n - 1.0) < 3 * std::sqrt(2.0 / n));
}

TEST_CASE("sim config boundary order") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  SimConfig bad = c;
  bad.m_inf = bad.m_neg_inf;
  CHECK_THROWS_AS(bad.validate(), tlp::ValidationError);
  bad = c;
  bad.n_inf = 2.0;
  CHECK_THROWS_AS(bad.validate(), tlp::ValidationError);
  bad = c;
  bad.m_star = 0.0;
  CHECK_THROWS_AS(bad.validate(), tlp::ValidationError);
  bad = c;
  bad.n_star = 0.5;
  CHECK_THROWS_AS(bad.validate(), tlp::ValidationError);
  bad = c;
  bad.max_turns = 0;
  CHECK_THROWS_AS(bad.validate(), tlp::ValidationError);
  CHECK_THROWS_AS(StakeProfile(0, {1.0}, {}), tlp::ValidationError);
  CHECK_THROWS_AS(StakeProfile(0, {-1.0}, {1.0}), tlp::ValidationError);
}

TEST_CASE("only Maxine stakes: right moves with probability (1 + kappa)/2") {
  const StakeProfile prof = StakeProfile::constant(1.0, 0.0);
  CHECK(prof.stake_win_prob(17, 0.7) == 1.0);
  for (double k : {0.3, 0.8}) {
    const GameParams p(k, 0.7);
    const long n = 40000;
    const double want = 0.5 * (1 + k);
    const double got = right_fraction(p, prof, n, 11);
    CHECK(std::fabs(got - want) < 3 * std::sqrt(want * (1 - want) / n));
  }
}

TEST_CASE("no stakes: symmetric walk") {
  const StakeProfile prof = StakeProfile::constant(0.0, 0.0);
  CHECK(prof.stake_win_prob(0, 1.0) == 0.5);
  const long n = 40000;
  const double got = right_fraction(GameParams(1.0, 1.0), prof, n, 5);
  CHECK(std::fabs(got - 0.5) < 3 * std::sqrt(0.25 / n));
}

TEST_CASE("traces are deterministic and consistent") {
  const tlp::AbmnWindow w = tlp::standard_solution(GameParams(0.5, 1.0), 1.0, 60);
  const StakeProfile prof = StakeProfile::from_window(w);
  SimConfig c = standard_config(w, 9);
  c.record_positions = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    tlp::Rng r1(s);
    tlp::Rng r2(s);
    const auto t1 = tlp::play_tlp(GameParams(0.5, 1.0), prof, 0, c, r1);
    const auto t2 = tlp::play_tlp(GameParams(0.5, 1.0), prof, 0, c, r2);
    REQUIRE(t1.positions == t2.positions);
    CHECK(t1.p_plus == t2.p_plus);
    CHECK(t1.positions.size() == static_cast<std::size_t>(t1.turns) + 1);
    for (std::size_t i = 1; i < t1.positions.size(); ++i) {
      CHECK(std::abs(t1.positions[i] - t1.positions[i - 1]) == 1);
    }
    double cost_a = 0, cost_b = 0;
    for (std::size_t i = 0; i + 1 < t1.positions.size(); ++i) {
      cost_a += prof.a(t1.positions[i]);
      cost_b += prof.b(t1.positions[i]);
    }
    CHECK(t1.maxine_cost == doctest::Approx(cost_a).epsilon(1e-12));
    const double terminal_plus = t1.outcome == tlp::Outcome::RightEscape  ? c.m_inf
                                 : t1.outcome == tlp::Outcome::LeftEscape ? c.m_neg_inf
                                                                          : c.m_star;
    const double terminal_minus = t1.outcome == tlp::Outcome::RightEscape  ? c.n_inf
                                  : t1.outcome == tlp::Outcome::LeftEscape ? c.n_neg_inf
                                                                           : c.n_star;
    CHECK(t1.p_plus == doctest::Approx(terminal_plus - cost_a).epsilon(1e-12));
    CHECK(t1.p_minus == doctest::Approx(terminal_minus - cost_b).epsilon(1e-12));
  }
}

TEST_CASE("unfinished games pay the unfinished amounts") {
  SimConfig c;
  c.max_turns = 3;
  c.escape_radius = 100;
  tlp::Rng r(1);
  const auto t = tlp::play_tlp(GameParams(0.5, 1.0), StakeProfile::constant(0.0, 0.0), 0, c, r);
  CHECK(t.outcome == tlp::Outcome::Unfinished);
  CHECK(t.turns == 3);
  CHECK(t.p_plus == c.m_star);
  CHECK(t.p_minus == c.n_star);
}

TEST_CASE("path results do not depend on the thread count") {
  const GameParams p(0.5, 1.0);
  const tlp::AbmnWindow w = tlp::standard_solution(p, 1.0, 60);
  const StakeProfile prof = StakeProfile::from_window(w);
  const SimConfig c = standard_config(w, 2024);
  const auto one = tlp::play_tlp_paths(p, prof, 0, c, 2000, 1);
  const auto four = tlp::play_tlp_paths(p, prof, 0, c, 2000, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].outcome == four[i].outcome);
    CHECK(one[i].turns == four[i].turns);
    CHECK(one[i].p_plus == four[i].p_plus);
    CHECK(one[i].p_minus == four[i].p_minus);
  }
  const auto s1 = tlp::summarize(one);
  const auto s4 = tlp::summarize(four);
  CHECK(s1.mean_p_plus == s4.mean_p_plus);
  CHECK(s1.se_p_plus == s4.se_p_plus);
}

TEST_CASE("equilibrium play escapes and pays the window values") {
  const GameParams p(0.5, 1.0);
  const tlp::AbmnWindow w = tlp::standard_solution(p, 1.0, 60);
  const StakeProfile prof = StakeProfile::from_window(w);
  const SimConfig c = standard_config(w, 77);
  for (int site : {-2, 0, 2}) {
    const auto s = tlp::run_tlp(p, prof, site, c, 20000);
    CAPTURE(site);
    CHECK(s.unfinished == 0);
    CHECK_FALSE(s.left_profile);
    CHECK(std::fabs(s.mean_p_plus - w.m(site)) < 3 * s.se_p_plus);
    CHECK(std::fabs(s.mean_p_minus - w.n(site)) < 3 * s.se_p_minus);
  }
}

TEST_CASE("escape from the battlefield") {
  const GameParams p(0.5, 1.0);
  const tlp::AbmnWindow w = tlp::standard_solution(p, 1.0, 60);
  const auto s = tlp::run_tlp(p, StakeProfile::from_window(w), 0, standard_config(w, 3), 10000);
  CHECK(static_cast<double>(s.unfinished) / s.paths < 1e-3);
}

TEST_CASE("starting far left of the battlefield rarely wins for Maxine") {
  const double k = 0.5;
  const GameParams p(k, 1.0);
  const tlp::AbmnWindow w = tlp::standard_solution(p, 1.0, 60);
  const long n = 10000;
  const auto s = tlp::run_tlp(p, StakeProfile::from_window(w), -30, standard_config(w, 4), n);
  // Walk with right-step probability (1 - k)/2 from 30 sites below.
  const double bound = std::pow((1 - k) / (1 + k), 30);
  const double freq = static_cast<double>(s.right) / n;
  CHECK(freq <= bound + 3 * std::sqrt(std::max(freq, 1.0 / n) * (1 - freq) / n));
}

TEST_CASE("penny forfeit closed form") {
  const auto e = tlp::penny_forfeit(GameParams(1, 1), 4, 4);
  CHECK(e.a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.b == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.global);
  for (double k : {0.2, 0.9}) {
    for (double r : {0.4, 1.0}) {
      const auto s = tlp::penny_forfeit(GameParams(k, r), 2.5, 2.5);
      CHECK(s.a == doctest::Approx(k * r * 2.5 / 4).epsilon(1e-14));
      CHECK(s.b == doctest::Approx(s.a).epsilon(1e-15));
    }
  }
  CHECK_FALSE(tlp::penny_forfeit(GameParams(0.2, 1.5), 1, 2).global);
  CHECK_THROWS_AS(tlp::penny_forfeit(GameParams(1, 1), 0, 1), tlp::ValidationError);
}

TEST_CASE("penny forfeit matches a brute-force stake grid") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> spread(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GameParams p(unit(gen), unit(gen));
    const double M = spread(gen);
    const double N = spread(gen);
    const auto e = tlp::penny_forfeit(p, M, N);
    // Neighbours m_{i-1} = 0, m_{i+1} = M; n_{i-1} = N, n_{i+1} = 0.
    const double hi_a = 4 * e.a;
    const auto ga = tlp::testing::grid_argmax(
        [&](double a) { return tlp::maxine_value(p, a, e.b, 0.0, M); }, 0.0, hi_a, 10000);
    const double hi_b = 4 * e.b;
    const auto gb = tlp::testing::grid_argmax(
        [&](double b) { return tlp::mina_value(p, e.a, b, N, 0.0); }, 0.0, hi_b, 10000);
    CAPTURE(p.to_string());
    CHECK(std::fabs(ga.x - e.a) <= hi_a / 10000);
    CHECK(std::fabs(gb.x - e.b) <= hi_b / 10000);
  }
}

TEST_CASE("one-step deviations do not pay on the (1, 1, 3) solution") {
  const tlp::AbmnWindow w = tlp::default_solution(GameParams(1, 1), 3.0, 40);
  for (int i = w.lo() + 2; i <= w.hi() - 2; ++i) {
    const auto d = tlp::deviation_gap(w, i, 2000);
    CAPTURE(i);
    if (std::abs(i) <= 3) {
      CHECK(d.maxine_resolved);
      CHECK(d.mina_resolved);
    }
    if (d.maxine_resolved) {
      CHECK(std::fabs(d.maxine_offset) <= 1.0);
      CHECK(d.maxine_doubled_drop > 0.0);
    }
    if (d.mina_resolved) {
      CHECK(std::fabs(d.mina_offset) <= 1.0);
      CHECK(d.mina_doubled_drop > 0.0);
    }
    CHECK(d.maxine_gap >= 0.0);
    CHECK(d.maxine_gap < 1e-12);
    CHECK(d.mina_gap < 1e-12);
    CHECK(d.maxine_value_error < 1e-8);
    CHECK(d.mina_value_error < 1e-8);
  }
  CHECK_THROWS_AS(tlp::deviation_gap(w, w.hi(), 100), tlp::ValidationError);
}

TEST_CASE("one-step deviations on the simulation window") {
  const tlp::AbmnWindow w = tlp::standard_solution(GameParams(0.5, 1.0), 1.0, 60);
  for (int i = w.lo() + 2; i <= w.hi() - 2; ++i) {
    const auto d = tlp::deviation_gap(w, i, 2000);
    CAPTURE(i);
    CHECK(d.maxine_resolved);
    CHECK(d.mina_resolved);
    CHECK(std::fabs(d.maxine_offset) <= 1.0);
    CHECK(std::fabs(d.mina_offset) <= 1.0);
  }
}

TEST_CASE("sde without drift has Brownian increments") {
  tlp::SdeOptions o;
  o.zero_drift = true;
  const double dt = 0.01;
  const auto path = tlp::simulate_sde(1.0, 0.0, 200.0, dt, 8, o);
  REQUIRE(path.noise.size() == 20000);
  double s2 = 0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    const double d = path.values[i] - path.values[i - 1];
    CHECK(std::fabs(d - path.noise[i - 1]) < 1e-12);
    s2 += d * d;
  }
  const double n = static_cast<double>(path.noise.size());
  CHECK(std::fabs(s2 / n - dt) < 3 * dt * std::sqrt(2.0 / n));
}

TEST_CASE("sde started at 10 drifts right at nearly unit speed") {
  const auto s = tlp::run_sde(1.0, 10.0, 5.0, 0.01, 99, 10000);
  CHECK(s.mean_slope >= 0.9);
  CHECK(s.mean_slope <= 1.0);
  CHECK(std::fabs(s.mean_slope - tlp::drift(1.0, 12.5)) < 0.02);
}

TEST_CASE("antithetic sde noise mirrors the plain noise") {
  tlp::SdeOptions anti;
  anti.antithetic = true;
  tlp::SdeOptions flat;
  flat.zero_drift = true;
  anti.zero_drift = true;
  const auto a = tlp::simulate_sde(0.5, 1.0, 1.0, 0.01, 21, flat);
  const auto b = tlp::simulate_sde(0.5, 1.0, 1.0, 0.01, 21, anti);
  for (std::size_t i = 0; i < a.noise.size(); ++i) CHECK(a.noise[i] == -b.noise[i]);
  CHECK(a.values.back() - 1.0 == doctest::Approx(-(b.values.back() - 1.0)).epsilon(1e-12));
}

TEST_CASE("sde slopes do not depend on the thread count") {
  const auto one = tlp::sde_slopes(1.0, 0.0, 1.0, 0.05, 5, 300, {}, 1);
  const auto four = tlp::sde_slopes(1.0, 0.0, 1.0, 0.05, 5, 300, {}, 4);
  CHECK(one == four);
}

TEST_CASE("scaled drift vanishes at the battlefield") {
  const double k = 0.05;
  const GameParams p(k, 1.0);
  const tlp::AbmnWindow w = tlp::default_solution(p, 1.0, 70);
  const auto rep = tlp::scaled_drift_check(p, 1.0, w, {0.0, 10.0}, 20000, 1);
  REQUIRE(rep.points.size() == 2);
  CHECK(std::fabs(rep.points[0].continuum_drift) < 1e-15);
  CHECK(rep.points[0].discrete_drift == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
  CHECK(std::fabs(rep.points[0].empirical_drift - rep.points[0].discrete_drift) <
        3 * rep.points[0].empirical_se);
  CHECK_FALSE(rep.points[1].covered);
}

TEST_CASE("scaled stakes converge at rate kappa") {
  std::vector<double> err;
  for (double k : {0.1, 0.05, 0.025}) {
    const GameParams p(k, 1.0);
    const auto w = tlp::default_solution(p, 1.0, static_cast<int>(std::ceil(3 / k)) + 10);
    const auto rep = tlp::scaled_drift_check(p, 1.0, w, {0.5}, 0, 1);
    REQUIRE(rep.points[0].covered);
    err.push_back(rep.points[0].stake_error);
  }
  CHECK(err[0] / err[1] >= 1.7);
  CHECK(err[1] / err[2] >= 1.7);
}

TEST_CASE("scaled check needs a battlefield-centred window") {
  const GameParams p(0.5, 1.0);
  const auto w = tlp::default_solution(p, 40.0, 30);
  CHECK_THROWS_AS(tlp::scaled_drift_check(p, 40.0, w, {0.0}, 0, 1), tlp::ValidationError);
}
