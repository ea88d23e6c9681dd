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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tlp/abmn.hpp"
#include "tlp/params.hpp"

namespace tlp {

// splitmix64 finalizer applied to (seed, index): the per-path seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// std::mt19937_64 (its output sequence is fixed by the C++ standard) with
// hand-written uniform and Gaussian transforms, since the standard
// distributions are implementation-defined. Uniforms take the top 53 bits;
// Gaussians use the Box-Muller transform and consume two uniforms each.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() noexcept;  // [0, 1)
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SimConfig {
  std::uint64_t seed = 1;
  long max_turns = 1'000'000;
  int escape_radius = 50;
  // Boundary data and the payment for an unfinished game.
  double m_neg_inf = 0.0;
  double m_inf = 1.0;
  double n_neg_inf = 1.0;
  double n_inf = 0.0;
  double m_star = -1.0;
  double n_star = -1.0;
  bool record_positions = false;

  void validate() const;
};

// Time-invariant stakes a_i (Maxine), b_i (Mina). Outside [first, last] the
// boundary values are reused and the trace is flagged.
class StakeProfile {
 public:
  StakeProfile(int first, std::vector<double> a, std::vector<double> b);
  static StakeProfile from_window(const AbmnWindow& w);
  static StakeProfile constant(double a, double b);

  int first() const noexcept { return first_; }
  int last() const noexcept { return first_ + static_cast<int>(a_.size()) - 1; }
  bool covers(int i) const noexcept { return unbounded_ || (i >= first() && i <= last()); }
  double a(int i) const noexcept { return a_[clamp(i)]; }
  double b(int i) const noexcept { return b_[clamp(i)]; }
  // Probability Maxine wins a stake turn at site i: a^rho / (a^rho + b^rho),
  // one half if both stakes are zero.
  double stake_win_prob(int i, double rho) const noexcept;

 private:
  std::size_t clamp(int i) const noexcept;
  int first_;
  bool unbounded_ = false;
  std::vector<double> a_, b_;
  std::vector<double> log_a_, log_b_;
};

enum class Outcome { LeftEscape, RightEscape, Unfinished };
const char* to_string(Outcome o) noexcept;

struct GameTrace {
  std::vector<int> positions;  // filled when record_positions is set
  int final_position = 0;
  long turns = 0;
  double maxine_cost = 0.0;
  double mina_cost = 0.0;
  Outcome outcome = Outcome::Unfinished;
  double p_plus = 0.0;
  double p_minus = 0.0;
  bool left_profile = false;  // visited a site outside the profile's window
};

GameTrace play_tlp(const GameParams& p, const StakeProfile& profile, int start,
                   const SimConfig& cfg, Rng& rng);

struct TlpSummary {
  long paths = 0;
  long left = 0;
  long right = 0;
  long unfinished = 0;
  double mean_p_plus = 0.0;
  double se_p_plus = 0.0;  // standard error of the mean
  double mean_p_minus = 0.0;
  double se_p_minus = 0.0;
  double mean_turns = 0.0;
  bool left_profile = false;
};

struct PathRecord {
  Outcome outcome = Outcome::Unfinished;
  long turns = 0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  bool left_profile = false;
};

// Path k uses Rng(mix_seed(cfg.seed, k)); results do not depend on threads.
std::vector<PathRecord> play_tlp_paths(const GameParams& p, const StakeProfile& profile,
                                       int start, const SimConfig& cfg, long paths,
                                       unsigned threads = 0);
TlpSummary summarize(const std::vector<PathRecord>& records);
TlpSummary run_tlp(const GameParams& p, const StakeProfile& profile, int start,
                   const SimConfig& cfg, long paths, unsigned threads = 0);

struct PennyForfeit {
  double a;
  double b;
  bool global;  // false when rho > 1: only a critical point is guaranteed
};

PennyForfeit penny_forfeit(const GameParams& p, double M, double N);

// One-step mean winnings with neighbours (m_lo, m_hi) and (n_lo, n_hi), where
// "lo" is site i-1.
double maxine_value(const GameParams& p, double a, double b, double m_lo, double m_hi);
double mina_value(const GameParams& p, double a, double b, double n_lo, double n_hi);

struct DeviationReport {
  int site = 0;
  double maxine_offset = 0.0;  // (grid argmax - a_i) in grid cells
  double mina_offset = 0.0;
  double maxine_gap = 0.0;     // best grid value minus value at a_i, relative
  double mina_gap = 0.0;
  double maxine_value_error = 0.0;  // |V(a_i) - m_i| relative
  double mina_value_error = 0.0;
  double maxine_doubled_drop = 0.0;  // value at a_i minus value at 2 a_i
  double mina_doubled_drop = 0.0;
  // False when a one-cell deviation changes the value by less than rounding,
  // which happens where a_i / b_i is astronomically far from 1.
  bool maxine_resolved = true;
  bool mina_resolved = true;
};

// Stake grid z = a_i * 2k / grid, k = 0..grid (likewise for b_i).
DeviationReport deviation_gap(const AbmnWindow& w, int i, int grid);

struct SdeOptions {
  bool zero_drift = false;
  bool antithetic = false;
};

struct SdePath {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> noise;  // the Brownian increments used
  double dt = 0.0;
  std::uint64_t seed = 0;
};

// Euler-Maruyama for dZ = R_rho(Z) du + dW.
SdePath simulate_sde(double rho, double z0, double horizon, double dt, std::uint64_t seed,
                     const SdeOptions& opts = {});

struct SdeSummary {
  long paths = 0;
  double mean_slope = 0.0;  // mean of (Z_T - z0) / T
  double se_slope = 0.0;
};

// (Z_T - z0) / T for path k seeded with mix_seed(seed, k).
std::vector<double> sde_slopes(double rho, double z0, double horizon, double dt,
                               std::uint64_t seed, long paths, const SdeOptions& opts = {},
                               unsigned threads = 0);
SdeSummary summarize_sde(const std::vector<double>& slopes);
SdeSummary run_sde(double rho, double z0, double horizon, double dt, std::uint64_t seed,
                   long paths, const SdeOptions& opts = {}, unsigned threads = 0);

struct ScaledPoint {
  double u = 0.0;
  int site = 0;
  bool covered = false;
  double discrete_drift = 0.0;    // kappa^{-1}(2 p(site) - 1)
  double continuum_drift = 0.0;   // (1 - S^rho)/(1 + S^rho) at (x, u)
  double discrete_stake = 0.0;    // kappa^{-2} a_site
  double continuum_stake = 0.0;   // a_rho(x, u)
  double stake_error = 0.0;       // |discrete - continuum|
  double empirical_drift = 0.0;   // from simulated single turns
  double empirical_se = 0.0;
};

struct ScaledDriftReport {
  std::vector<ScaledPoint> points;
  double max_drift_dev = 0.0;
  double max_stake_rel_dev = 0.0;
  double margin = 1.0;  // n_{-inf} / m_{inf} of the window
};

ScaledDriftReport scaled_drift_check(const GameParams& p, double x, const AbmnWindow& w,
                                     const std::vector<double>& u_points, long paths,
                                     std::uint64_t seed);

}  // namespace tlp
