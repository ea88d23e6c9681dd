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

#include "tlp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "tlp/bboost.hpp"
#include "tlp/error.hpp"
#include "tlp/numerics.hpp"

namespace tlp {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

void SimConfig::validate() const {
  if (max_turns <= 0) throw ValidationError("max_turns must be > 0");
  if (escape_radius <= 0) throw ValidationError("escape_radius must be > 0");
  if (!(m_neg_inf < m_inf)) throw ValidationError("need m_{-inf} < m_{inf}");
  if (!(n_inf < n_neg_inf)) throw ValidationError("need n_{inf} < n_{-inf}");
  if (!(m_star < m_neg_inf)) throw ValidationError("need m_* < m_{-inf}");
  if (!(n_star < n_inf)) throw ValidationError("need n_* < n_{inf}");
}

StakeProfile::StakeProfile(int first, std::vector<double> a, std::vector<double> b)
    : first_(first), a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size()) {
    throw ValidationError("StakeProfile: a and b must be non-empty and of equal length");
  }
  log_a_.resize(a_.size());
  log_b_.resize(b_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] >= 0.0) || !(b_[i] >= 0.0)) {
      throw ValidationError("StakeProfile: stakes must be >= 0");
    }
    log_a_[i] = a_[i] > 0.0 ? std::log(a_[i]) : kNegInf;
    log_b_[i] = b_[i] > 0.0 ? std::log(b_[i]) : kNegInf;
  }
}

StakeProfile StakeProfile::from_window(const AbmnWindow& w) {
  std::vector<double> a, b;
  for (int i = w.lo() + 1; i <= w.hi() - 1; ++i) {
    a.push_back(w.a(i));
    b.push_back(w.b(i));
  }
  StakeProfile s(w.lo() + 1, std::move(a), std::move(b));
  // Log stakes straight from the window keep tiny stakes exact.
  for (int i = w.lo() + 1; i <= w.hi() - 1; ++i) {
    s.log_a_[static_cast<std::size_t>(i - s.first_)] = w.log_a(i);
    s.log_b_[static_cast<std::size_t>(i - s.first_)] = w.log_b(i);
  }
  return s;
}

StakeProfile StakeProfile::constant(double a, double b) {
  StakeProfile s(0, {a}, {b});
  s.unbounded_ = true;
  return s;
}

std::size_t StakeProfile::clamp(int i) const noexcept {
  if (i <= first_) return 0;
  const int l = last();
  return static_cast<std::size_t>((i >= l ? l : i) - first_);
}

double StakeProfile::stake_win_prob(int i, double rho) const noexcept {
  const std::size_t s = clamp(i);
  const double la = log_a_[s];
  const double lb = log_b_[s];
  if (la == kNegInf && lb == kNegInf) return 0.5;
  return 1.0 / (1.0 + std::exp(rho * (lb - la)));
}

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::LeftEscape:
      return "left_escape";
    case Outcome::RightEscape:
      return "right_escape";
    case Outcome::Unfinished:
      return "unfinished";
  }
  return "unknown";
}

GameTrace play_tlp(const GameParams& p, const StakeProfile& profile, int start,
                   const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  GameTrace t;
  int x = start;
  if (cfg.record_positions) t.positions.push_back(x);
  const double k = p.kappa();
  const double rho = p.rho();
  while (std::abs(x) < cfg.escape_radius && t.turns < cfg.max_turns) {
    if (!profile.covers(x)) t.left_profile = true;
    t.maxine_cost += profile.a(x);
    t.mina_cost += profile.b(x);
    const double u_kind = rng.uniform();
    const double u_coin = rng.uniform();
    const double p_right = u_kind < k ? profile.stake_win_prob(x, rho) : 0.5;
    x += u_coin < p_right ? 1 : -1;
    ++t.turns;
    if (cfg.record_positions) t.positions.push_back(x);
  }
  t.final_position = x;
  double tp, tm;
  if (x >= cfg.escape_radius) {
    t.outcome = Outcome::RightEscape;
    tp = cfg.m_inf;
    tm = cfg.n_inf;
  } else if (x <= -cfg.escape_radius) {
    t.outcome = Outcome::LeftEscape;
    tp = cfg.m_neg_inf;
    tm = cfg.n_neg_inf;
  } else {
    t.outcome = Outcome::Unfinished;
    tp = cfg.m_star;
    tm = cfg.n_star;
  }
  t.p_plus = tp - t.maxine_cost;
  t.p_minus = tm - t.mina_cost;
  return t;
}

namespace {

// Mean and standard error, both by pairwise summation.
std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = v.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::vector<PathRecord> play_tlp_paths(const GameParams& p, const StakeProfile& profile,
                                       int start, const SimConfig& cfg, long paths,
                                       unsigned threads) {
  cfg.validate();
  if (paths <= 0) throw ValidationError("run_tlp: paths must be > 0");
  SimConfig c = cfg;
  c.record_positions = false;
  std::vector<PathRecord> out(static_cast<std::size_t>(paths));
  parallel_for(
      out.size(),
      [&](std::size_t i) {
        Rng rng(mix_seed(cfg.seed, i));
        const GameTrace t = play_tlp(p, profile, start, c, rng);
        out[i] = {t.outcome, t.turns, t.p_plus, t.p_minus, t.left_profile};
      },
      threads);
  return out;
}

TlpSummary summarize(const std::vector<PathRecord>& records) {
  if (records.empty()) throw ValidationError("summarize: no paths");
  const std::size_t n = records.size();
  std::vector<double> pp(n), pm(n), turns(n);
  TlpSummary s;
  s.paths = static_cast<long>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PathRecord& r = records[i];
    switch (r.outcome) {
      case Outcome::LeftEscape:
        ++s.left;
        break;
      case Outcome::RightEscape:
        ++s.right;
        break;
      case Outcome::Unfinished:
        ++s.unfinished;
        break;
    }
    if (r.left_profile) s.left_profile = true;
    pp[i] = r.p_plus;
    pm[i] = r.p_minus;
    turns[i] = static_cast<double>(r.turns);
  }
  std::tie(s.mean_p_plus, s.se_p_plus) = mean_se(pp);
  std::tie(s.mean_p_minus, s.se_p_minus) = mean_se(pm);
  s.mean_turns = pairwise_sum(turns) / static_cast<double>(n);
  return s;
}

TlpSummary run_tlp(const GameParams& p, const StakeProfile& profile, int start,
                   const SimConfig& cfg, long paths, unsigned threads) {
  return summarize(play_tlp_paths(p, profile, start, cfg, paths, threads));
}

PennyForfeit penny_forfeit(const GameParams& p, double M, double N) {
  if (!(M > 0.0) || !(N > 0.0) || !std::isfinite(M) || !std::isfinite(N)) {
    throw ValidationError("penny_forfeit: M and N must be finite and > 0");
  }
  const double r = p.rho();
  const double lM = std::log(M);
  const double lN = std::log(N);
  const double la =
      std::log(p.kappa() * r) + (1.0 + r) * lM + r * lN - 2.0 * log_add(r * lM, r * lN);
  return {std::exp(la), std::exp(la + lN - lM), r <= 1.0};
}

namespace {

// kappa / (1 + (y/z)^rho), the stake-turn share of the player staking z
// against y; defined as kappa/2 when both are zero.
double stake_share(double kappa, double rho, double z, double y) {
  if (z == 0.0 && y == 0.0) return 0.5 * kappa;
  if (z == 0.0) return 0.0;
  if (y == 0.0) return kappa;
  return kappa / (1.0 + std::exp(rho * (std::log(y) - std::log(z))));
}

}  // namespace

double maxine_value(const GameParams& p, double a, double b, double m_lo, double m_hi) {
  const double k = p.kappa();
  const double w = stake_share(k, p.rho(), a, b);
  return (w + 0.5 * (1.0 - k)) * m_hi + (k - w + 0.5 * (1.0 - k)) * m_lo - a;
}

double mina_value(const GameParams& p, double a, double b, double n_lo, double n_hi) {
  const double k = p.kappa();
  const double w = stake_share(k, p.rho(), b, a);
  return (w + 0.5 * (1.0 - k)) * n_lo + (k - w + 0.5 * (1.0 - k)) * n_hi - b;
}

DeviationReport deviation_gap(const AbmnWindow& w, int i, int grid) {
  if (i <= w.lo() + 1 || i >= w.hi() - 1) {
    throw ValidationError("deviation_gap: site must be strictly inside the stake range");
  }
  if (grid < 4) throw ValidationError("deviation_gap: grid must be >= 4");
  const GameParams& p = w.params();
  const double k = p.kappa();
  const double r = p.rho();
  const double lM = log_add(w.log_m_inc(i - 1), w.log_m_inc(i));
  const double lN = log_add(w.log_n_inc(i - 1), w.log_n_inc(i));
  const double la = w.log_a(i);
  const double lb = w.log_b(i);

  // Work in units where the own equilibrium stake is 1 and the neighbour
  // spread is 1: v(z) = kappa / (1 + (q/z)^rho) - c z, c = stake/spread.
  struct Side {
    double offset, gap, drop;
    bool resolved;
  };
  auto scan = [&](double lq, double lc) {
    const double c = std::exp(lc);
    auto v = [&](double z) {
      if (z == 0.0) return 0.0;
      return k / (1.0 + std::exp(r * (lq - std::log(z)))) - c * z;
    };
    const double cell = 2.0 / grid;
    double best = -std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (int j = 0; j <= grid; ++j) {
      const double z = cell * j;
      const double val = v(z);
      if (val > best) {
        best = val;
        arg = z;
      }
    }
    const double at = v(1.0);
    const double scale = std::max(std::fabs(at), c);
    // Far from the battlefield v is flat to about c / q near z = 1; a one-cell
    // move must change v by more than rounding for the argmax to mean much.
    const double step = std::min(at - v(1.0 - cell), at - v(1.0 + cell));
    const bool resolved = step > 64.0 * std::numeric_limits<double>::epsilon() * scale;
    return Side{(arg - 1.0) / cell, (best - at) / scale, at - v(2.0), resolved};
  };
  const Side mx = scan(lb - la, la - lM);
  const Side mn = scan(la - lb, lb - lN);

  DeviationReport rep;
  rep.site = i;
  rep.maxine_offset = mx.offset;
  rep.mina_offset = mn.offset;
  rep.maxine_gap = mx.gap;
  rep.mina_gap = mn.gap;
  rep.maxine_doubled_drop = mx.drop;
  rep.mina_doubled_drop = mn.drop;
  rep.maxine_resolved = mx.resolved;
  rep.mina_resolved = mn.resolved;
  const double M = std::exp(lM);
  const double N = std::exp(lN);
  const double vm = maxine_value(p, w.a(i), w.b(i), w.m(i - 1), w.m(i + 1));
  const double vn = mina_value(p, w.a(i), w.b(i), w.n(i - 1), w.n(i + 1));
  rep.maxine_value_error = std::fabs(vm - w.m(i)) / (std::fabs(w.m(i)) + M);
  rep.mina_value_error = std::fabs(vn - w.n(i)) / (std::fabs(w.n(i)) + N);
  return rep;
}

SdePath simulate_sde(double rho, double z0, double horizon, double dt, std::uint64_t seed,
                     const SdeOptions& opts) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ValidationError("simulate_sde: need dt, horizon > 0");
  if (!(rho > 0.0) || !std::isfinite(z0)) throw ValidationError("simulate_sde: bad rho or z0");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  SdePath path;
  path.dt = dt;
  path.seed = seed;
  path.times.reserve(steps + 1);
  path.values.reserve(steps + 1);
  path.noise.reserve(steps);
  Rng rng(seed);
  const double sq = std::sqrt(dt);
  double z = z0;
  path.times.push_back(0.0);
  path.values.push_back(z);
  for (std::size_t s = 0; s < steps; ++s) {
    double dw = sq * rng.normal();
    if (opts.antithetic) dw = -dw;
    const double mu = opts.zero_drift ? 0.0 : drift(rho, z);
    z += mu * dt + dw;
    path.noise.push_back(dw);
    path.times.push_back(static_cast<double>(s + 1) * dt);
    path.values.push_back(z);
  }
  return path;
}

std::vector<double> sde_slopes(double rho, double z0, double horizon, double dt,
                               std::uint64_t seed, long paths, const SdeOptions& opts,
                               unsigned threads) {
  if (paths <= 0) throw ValidationError("run_sde: paths must be > 0");
  std::vector<double> slope(static_cast<std::size_t>(paths));
  parallel_for(
      slope.size(),
      [&](std::size_t i) {
        const SdePath path = simulate_sde(rho, z0, horizon, dt, mix_seed(seed, i), opts);
        slope[i] = (path.values.back() - z0) / path.times.back();
      },
      threads);
  return slope;
}

SdeSummary summarize_sde(const std::vector<double>& slopes) {
  if (slopes.empty()) throw ValidationError("summarize_sde: no paths");
  SdeSummary s;
  s.paths = static_cast<long>(slopes.size());
  std::tie(s.mean_slope, s.se_slope) = mean_se(slopes);
  return s;
}

SdeSummary run_sde(double rho, double z0, double horizon, double dt, std::uint64_t seed,
                   long paths, const SdeOptions& opts, unsigned threads) {
  return summarize_sde(sde_slopes(rho, z0, horizon, dt, seed, paths, opts, threads));
}

ScaledDriftReport scaled_drift_check(const GameParams& p, double x, const AbmnWindow& w,
                                     const std::vector<double>& u_points, long paths,
                                     std::uint64_t seed) {
  if (w.battlefield() != 0) {
    throw ValidationError("scaled_drift_check: window must have battlefield index 0");
  }
  const double k = p.kappa();
  const double r = p.rho();
  ScaledDriftReport rep;
  rep.margin = w.margin();
  const StakeProfile prof = StakeProfile::from_window(w);
  for (std::size_t idx = 0; idx < u_points.size(); ++idx) {
    const double u = u_points[idx];
    ScaledPoint pt;
    pt.u = u;
    pt.site = static_cast<int>(std::floor(u / k + 1e-9));
    pt.covered = pt.site > w.lo() && pt.site < w.hi();
    if (!pt.covered) {
      rep.points.push_back(pt);
      continue;
    }
    const double q = prof.stake_win_prob(pt.site, r);
    pt.discrete_drift = 2.0 * q - 1.0;  // kappa^{-1}(2p - 1), p = (1-k)/2 + k q
    pt.continuum_drift = -std::tanh(0.5 * flow(r, x, u).log_j);
    pt.discrete_stake = w.a(pt.site) / (k * k);
    pt.continuum_stake = ode_pair(r, x, u).a;
    pt.stake_error = std::fabs(pt.discrete_stake - pt.continuum_stake);
    if (paths > 0) {
      Rng rng(mix_seed(seed, idx));
      long right = 0;
      for (long s = 0; s < paths; ++s) {
        const double u_kind = rng.uniform();
        const double u_coin = rng.uniform();
        const double pr = u_kind < k ? q : 0.5;
        if (u_coin < pr) ++right;
      }
      const double ph = static_cast<double>(right) / static_cast<double>(paths);
      pt.empirical_drift = (2.0 * ph - 1.0) / k;
      pt.empirical_se = 2.0 * std::sqrt(ph * (1.0 - ph) / static_cast<double>(paths)) / k;
    }
    rep.max_drift_dev = std::max(rep.max_drift_dev, std::fabs(pt.discrete_drift - pt.continuum_drift));
    rep.max_stake_rel_dev =
        std::max(rep.max_stake_rel_dev, pt.stake_error / std::fabs(pt.continuum_stake));
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace tlp
