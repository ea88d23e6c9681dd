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

#include "tlp/abmn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tlp/error.hpp"
#include "tlp/numerics.hpp"

namespace tlp {

namespace {

constexpr int kMaxTailSteps = 2'000'000;

// Walks the default-solution increments outward from the centre, one orbit
// point per step. Forward: ls is the orbit point whose c, d multiply next.
// Backward: ls is the orbit point one above the next one to be produced.
struct Walker {
  const GameParams* p;
  int dir;
  double tol;
  double ls;
  double lm;  // ln m_{k,k+1} of the last produced k
  double ln;  // ln n_{k+1,k}
  double log_orbit = 0.0;  // orbit point consumed by the last step

  void step() {
    if (dir > 0) {
      const LogQuad q = forward_quad(*p, ls, tol);
      log_orbit = ls;
      lm += q.log_c1;
      ln += q.log_d1;
      ls = q.log_phi1;
    } else {
      const LogQuad q = backward_quad(*p, ls, tol);
      lm -= q.log_c1;
      ln -= q.log_d1;
      ls = q.log_phi0;
      log_orbit = ls;
    }
  }
};

struct TailSum {
  double m = 0.0;
  double n = 0.0;
  double m_bound = 0.0;
  double n_bound = 0.0;
  int steps = 0;
};

double geometric_bound(double term, double ratio, double limit) {
  const double r = std::max(ratio, limit);
  if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
  return term * r / (1.0 - r);
}

// Sums walker terms until the geometric bound on the rest is below
// rel * (reference + accumulated) for both series, and at least min_steps
// steps have been taken.
TailSum walk_tail(Walker& w, double ref_m, double ref_n, double rel, int min_steps,
                  std::vector<double>* lms = nullptr, std::vector<double>* lns = nullptr) {
  const double k = w.p->kappa();
  const double limit = (1.0 - k) / (1.0 + k);
  TailSum t;
  for (;;) {
    const double lm_prev = w.lm;
    const double ln_prev = w.ln;
    w.step();
    ++t.steps;
    const double tm = std::exp(w.lm);
    const double tn = std::exp(w.ln);
    t.m += tm;
    t.n += tn;
    if (lms) lms->push_back(w.lm);
    if (lns) lns->push_back(w.ln);
    t.m_bound = tm == 0.0 ? 0.0 : geometric_bound(tm, std::exp(w.lm - lm_prev), limit);
    t.n_bound = tn == 0.0 ? 0.0 : geometric_bound(tn, std::exp(w.ln - ln_prev), limit);
    const bool small = t.m_bound <= rel * (ref_m + t.m) && t.n_bound <= rel * (ref_n + t.n);
    if (small && t.steps >= min_steps) return t;
    if (t.steps >= kMaxTailSteps || !std::isfinite(w.ls)) {
      throw ConvergenceError("series tail did not reach tolerance within step budget");
    }
  }
}

void check_x(double x) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    std::ostringstream os;
    os << "x must be finite and > 0, got " << x;
    throw ValidationError(os.str());
  }
}

std::size_t checked_slot(int i, int first, std::size_t size, const char* what) {
  const long s = static_cast<long>(i) - first;
  if (s < 0 || static_cast<std::size_t>(s) >= size) {
    std::ostringstream os;
    os << what << ": index " << i << " outside the window";
    throw RangeError(os.str(), static_cast<double>(i));
  }
  return static_cast<std::size_t>(s);
}

// |e^d - 1| / (e^d + 1) for d = ln L - ln R.
double rel_gap_log(double d) { return std::fabs(std::tanh(0.5 * d)); }

void assemble_stakes(const GameParams& p, double lM, double lN, double& la, double& lb) {
  const double r = p.rho();
  la = std::log(p.kappa() * r) + (1.0 + r) * lM + r * lN - 2.0 * log_add(r * lM, r * lN);
  lb = la + lN - lM;
}

}  // namespace

double AbmnWindow::log_m_inc(int i) const {
  return log_m_inc_[checked_slot(i, lo_, log_m_inc_.size(), "log_m_inc")];
}
double AbmnWindow::log_n_inc(int i) const {
  return log_n_inc_[checked_slot(i, lo_, log_n_inc_.size(), "log_n_inc")];
}
double AbmnWindow::log_a(int i) const {
  return log_a_[checked_slot(i, lo_ + 1, log_a_.size(), "a")];
}
double AbmnWindow::log_b(int i) const {
  return log_b_[checked_slot(i, lo_ + 1, log_b_.size(), "b")];
}
double AbmnWindow::a(int i) const { return std::exp(log_a(i)); }
double AbmnWindow::b(int i) const { return std::exp(log_b(i)); }
double AbmnWindow::m(int i) const { return m_[checked_slot(i, lo_, m_.size(), "m")]; }
double AbmnWindow::n(int i) const { return n_[checked_slot(i, lo_, n_.size(), "n")]; }
double AbmnWindow::phi(int i) const {
  return phi_[checked_slot(i, lo_ + 1, phi_.size(), "phi")];
}

void AbmnWindow::set_stakes(int i, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("set_stakes: stakes must be > 0");
  log_a_[checked_slot(i, lo_ + 1, log_a_.size(), "a")] = std::log(a);
  log_b_[checked_slot(i, lo_ + 1, log_b_.size(), "b")] = std::log(b);
}

AbmnWindow default_solution(const GameParams& p, double x, int half_len) {
  require_regime(p, Regime::Algebraic, "default_solution");
  check_x(x);
  if (half_len < 2) throw ValidationError("default_solution: half_len must be >= 2");

  const SOrbit orbit = s_orbit(p, x, half_len - 1, half_len - 1);
  AbmnWindow w(p, x);
  w.requested_half_len_ = half_len;
  w.truncated_ = orbit.truncated;
  w.lo_ = -orbit.i_neg - 1;
  w.hi_ = orbit.i_pos + 1;
  const int lo = w.lo_;
  const int hi = w.hi_;

  // Increment logs on [lo, hi-1]; k = -1 carries the normalization.
  const std::size_t ninc = static_cast<std::size_t>(hi - lo);
  w.log_m_inc_.assign(ninc, 0.0);
  w.log_n_inc_.assign(ninc, 0.0);
  auto slot = [lo](int k) { return static_cast<std::size_t>(k - lo); };
  const double lk = std::log(p.kappa());
  const double lx = std::log(x);
  w.log_m_inc_[slot(-1)] = lk;
  w.log_n_inc_[slot(-1)] = lk + lx;
  for (int k = 0; k <= hi - 1; ++k) {
    const std::size_t o = orbit.slot(k);
    w.log_m_inc_[slot(k)] = w.log_m_inc_[slot(k - 1)] + orbit.log_c1[o];
    w.log_n_inc_[slot(k)] = w.log_n_inc_[slot(k - 1)] + orbit.log_d1[o];
  }
  for (int k = -2; k >= lo; --k) {
    const std::size_t o = orbit.slot(k + 1);
    w.log_m_inc_[slot(k)] = w.log_m_inc_[slot(k + 1)] - orbit.log_c1[o];
    w.log_n_inc_[slot(k)] = w.log_n_inc_[slot(k + 1)] - orbit.log_d1[o];
  }

  // Window sums, then tails summed past the window in log space.
  double win_m = 0.0, win_n = 0.0;
  for (std::size_t s = 0; s < ninc; ++s) {
    win_m += std::exp(w.log_m_inc_[s]);
    win_n += std::exp(w.log_n_inc_[s]);
  }
  constexpr double kTailRel = 1e-17;
  Walker fw{&p, +1, kDefaultTol, forward_quad(p, orbit.log_value(hi - 1)).log_phi1,
            w.log_m_inc_[slot(hi - 1)], w.log_n_inc_[slot(hi - 1)]};
  const TailSum ft = walk_tail(fw, win_m, win_n, kTailRel, 1);
  Walker bw{&p, -1, kDefaultTol, orbit.log_value(lo + 1), w.log_m_inc_[slot(lo)],
            w.log_n_inc_[slot(lo)]};
  const TailSum bt = walk_tail(bw, win_m, win_n, kTailRel, 1);

  // Cumulative values: m_{-inf} = 0, n_{+inf} = 0.
  const std::size_t nsite = ninc + 1;
  w.m_.assign(nsite, 0.0);
  w.n_.assign(nsite, 0.0);
  w.m_[0] = bt.m;
  for (std::size_t s = 1; s < nsite; ++s) w.m_[s] = w.m_[s - 1] + std::exp(w.log_m_inc_[s - 1]);
  w.n_[nsite - 1] = ft.n;
  for (std::size_t s = nsite - 1; s-- > 0;) w.n_[s] = w.n_[s + 1] + std::exp(w.log_n_inc_[s]);
  w.m_inf_total_ = w.m_[nsite - 1] + ft.m;
  w.n_neg_inf_total_ = w.n_[0] + bt.n;
  w.tail_bound_ = (ft.m_bound + bt.m_bound) / w.m_inf_total_ +
                  (ft.n_bound + bt.n_bound) / w.n_neg_inf_total_;

  // Stakes on the interior sites.
  const std::size_t nint = ninc - 1;
  w.log_a_.assign(nint, 0.0);
  w.log_b_.assign(nint, 0.0);
  for (int i = lo + 1; i <= hi - 1; ++i) {
    const double lM = log_add(w.log_m_inc_[slot(i - 1)], w.log_m_inc_[slot(i)]);
    const double lN = log_add(w.log_n_inc_[slot(i - 1)], w.log_n_inc_[slot(i)]);
    assemble_stakes(p, lM, lN, w.log_a_[slot(i) - 1], w.log_b_[slot(i) - 1]);
  }

  w.phi_.assign(ninc, 0.0);
  for (int i = lo + 1; i <= hi; ++i) {
    w.phi_[slot(i) - 1] = std::exp(w.log_n_inc_[slot(i - 1)] - w.log_m_inc_[slot(i - 1)]);
  }
  w.battlefield_ = battlefield_index(p, x);
  return w;
}

AbmnWindow standard_solution(const GameParams& p, double x, int half_len) {
  AbmnWindow w = default_solution(p, x, half_len);
  const double mu = 1.0 / w.m_inf_total_;
  const double lmu = std::log(mu);
  for (double& v : w.log_m_inc_) v += lmu;
  for (double& v : w.log_n_inc_) v += lmu;
  for (double& v : w.log_a_) v += lmu;
  for (double& v : w.log_b_) v += lmu;
  for (double& v : w.m_) v *= mu;
  for (double& v : w.n_) v *= mu;
  w.n_neg_inf_total_ *= mu;
  w.m_inf_total_ = 1.0;
  w.scale_ = mu;
  return w;
}

AbmnWindow role_reversed(const AbmnWindow& w) {
  AbmnWindow r(w.params_, 1.0);
  r.lo_ = -w.hi_;
  r.hi_ = -w.lo_;
  r.requested_half_len_ = w.requested_half_len_;
  r.truncated_ = w.truncated_;
  r.scale_ = w.scale_;
  const std::size_t ninc = w.log_m_inc_.size();
  r.log_m_inc_.resize(ninc);
  r.log_n_inc_.resize(ninc);
  // New increment k comes from old increment -k-1.
  for (std::size_t s = 0; s < ninc; ++s) {
    r.log_m_inc_[s] = w.log_n_inc_[ninc - 1 - s];
    r.log_n_inc_[s] = w.log_m_inc_[ninc - 1 - s];
  }
  const std::size_t nint = w.log_a_.size();
  r.log_a_.resize(nint);
  r.log_b_.resize(nint);
  for (std::size_t s = 0; s < nint; ++s) {
    r.log_a_[s] = w.log_b_[nint - 1 - s];
    r.log_b_[s] = w.log_a_[nint - 1 - s];
  }
  const std::size_t nsite = w.m_.size();
  r.m_.resize(nsite);
  r.n_.resize(nsite);
  for (std::size_t s = 0; s < nsite; ++s) {
    r.m_[s] = w.n_[nsite - 1 - s];
    r.n_[s] = w.m_[nsite - 1 - s];
  }
  // phi'_i = 1 / phi_{1-i}
  const std::size_t nphi = w.phi_.size();
  r.phi_.resize(nphi);
  for (std::size_t s = 0; s < nphi; ++s) r.phi_[s] = 1.0 / w.phi_[nphi - 1 - s];
  r.m_inf_total_ = w.n_neg_inf_total_;
  r.n_neg_inf_total_ = w.m_inf_total_;
  r.tail_bound_ = w.tail_bound_;
  r.x_ = std::exp(r.log_n_inc(-1) - r.log_m_inc(-1));
  r.battlefield_ = 1 - w.battlefield_;
  return r;
}

double abmn_residual_at(const AbmnWindow& w, int i) {
  if (i <= w.lo() || i >= w.hi()) throw ValidationError("abmn_residual_at: site outside the interior");
  const GameParams& p = w.params();
  const double k = p.kappa();
  const double r = p.rho();
  const double la = w.log_a(i);
  const double lb = w.log_b(i);
  const double lm0 = w.log_m_inc(i - 1);
  const double lm1 = w.log_m_inc(i);
  const double ln0 = w.log_n_inc(i - 1);
  const double ln1 = w.log_n_inc(i);
  const double lM = log_add(lm0, lm1);
  const double lN = log_add(ln0, ln1);

  // ABMN(1) and ABMN(2) with m_{i-1}, resp. n_{i+1}, subtracted:
  //   m_{i-1,i} + a_i = P(right) (m_{i-1,i} + m_{i,i+1})
  //   n_{i+1,i} + b_i = P(left)  (n_{i,i-1} + n_{i+1,i}).
  // The cumulative values are flat (or subnormal) in the tails; the
  // increments keep every term at its own scale.
  const double lwa = -log_add(0.0, r * (lb - la));  // ln a^r/(a^r+b^r)
  const double lwb = -log_add(0.0, r * (la - lb));
  const double lk_hi = std::log(0.5 * (1.0 + k));
  const double lk_lo = k < 1.0 ? std::log(0.5 * (1.0 - k)) : kNegInf;
  const double l_right = log_add(lwa + lk_hi, lwb + lk_lo);
  const double l_left = log_add(lwa + lk_lo, lwb + lk_hi);
  double worst = rel_gap_log(log_add(lm0, la) - (l_right + lM));
  worst = std::max(worst, rel_gap_log(log_add(ln1, lb) - (l_left + lN)));

  // ABMN(3), ABMN(4).
  const double lrk = std::log(r * k);
  const double lhs = 2.0 * log_add(r * la, r * lb);
  worst = std::max(worst, rel_gap_log(lhs - (lrk + (r - 1.0) * la + r * lb + lM)));
  worst = std::max(worst, rel_gap_log(lhs - (lrk + r * la + (r - 1.0) * lb + lN)));
  return worst;
}

double abmn_residuals(const AbmnWindow& w) {
  double worst = 0.0;
  for (int i = w.lo() + 1; i <= w.hi() - 1; ++i) worst = std::max(worst, abmn_residual_at(w, i));
  return worst;
}

int battlefield_index(const GameParams& p, double x, double tol) {
  require_regime(p, Regime::Algebraic, "battlefield_index");
  check_x(x);
  const CentralDomain D = central_domain(p);
  const double llo = std::log(D.lo);
  const double lhi = std::log(D.hi);
  double ls = std::log(x);
  // Index 0 is x itself; compare in logs against the half-open interval.
  auto inside = [&](double l) { return l > llo && l <= lhi; };
  constexpr int kMaxSteps = 10'000'000;
  int k = 0;
  int dir = 0;
  while (!inside(ls)) {
    if (std::abs(k) >= kMaxSteps || !std::isfinite(ls)) {
      throw ConvergenceError("battlefield_index: orbit did not reach the central domain");
    }
    if (ls > lhi) {
      // Stepping down after stepping up: the point sits on the boundary and
      // rounding pushed it across. The upper end belongs to the domain.
      if (dir < 0) return k;
      ls = forward_quad(p, ls, tol).log_phi1;
      ++k;
      dir = 1;
    } else {
      if (dir > 0) return k - 1;
      ls = backward_quad(p, ls, tol).log_phi0;
      --k;
      dir = -1;
    }
  }
  return k;
}

MarginEval mina_margin_eval(const GameParams& p, double x, double rel_tol, int min_half_len) {
  require_regime(p, Regime::Algebraic, "mina_margin");
  check_x(x);
  if (!(rel_tol > 0.0)) throw ValidationError("mina_margin: rel_tol must be > 0");
  const double lk = std::log(p.kappa());
  const double lx = std::log(x);
  const double cm = p.kappa();
  const double cn = p.kappa() * x;

  // Each side is first walked against the centre term alone, which makes the
  // stopping rule conservative.
  Walker fw{&p, +1, kDefaultTol * 1e-2, lx, lk, lk + lx};
  const TailSum ft = walk_tail(fw, cm, cn, rel_tol, std::max(min_half_len, 1));
  Walker bw{&p, -1, kDefaultTol * 1e-2, lx, lk, lk + lx};
  const TailSum bt = walk_tail(bw, cm, cn, rel_tol, std::max(min_half_len - 1, 1));

  MarginEval e;
  e.sum_m = cm + ft.m + bt.m;
  e.sum_n = cn + ft.n + bt.n;
  e.margin = e.sum_n / e.sum_m;
  e.steps_pos = ft.steps;
  e.steps_neg = bt.steps + 1;
  // Every summed term carries the walker's solve tolerance and a few ulps of
  // rounding; the omitted tails underflow to zero near kappa = 1.
  const double per_term = kDefaultTol * 1e-2 + 4.0 * std::numeric_limits<double>::epsilon();
  e.bound = (ft.m_bound + bt.m_bound) / e.sum_m + (ft.n_bound + bt.n_bound) / e.sum_n +
            2.0 * per_term * (e.steps_pos + e.steps_neg);
  return e;
}

double mina_margin(const GameParams& p, double x, double rel_tol) {
  return mina_margin_eval(p, x, rel_tol).margin;
}

double finite_margin(const GameParams& p, double x, int j, int k) {
  require_regime(p, Regime::Algebraic, "finite_margin");
  check_x(x);
  if (j < 1 || k < 1) throw ValidationError("finite_margin: j and k must be >= 1");
  const double lk = std::log(p.kappa());
  const double lx = std::log(x);
  double sm = p.kappa();
  double sn = p.kappa() * x;
  Walker fw{&p, +1, kDefaultTol * 1e-2, lx, lk, lk + lx};
  for (int s = 0; s < k; ++s) {
    fw.step();
    sm += std::exp(fw.lm);
    sn += std::exp(fw.ln);
  }
  Walker bw{&p, -1, kDefaultTol * 1e-2, lx, lk, lk + lx};
  for (int s = 0; s < j; ++s) {
    bw.step();
    sm += std::exp(bw.lm);
    sn += std::exp(bw.ln);
  }
  return sn / sm;
}

MarginScan lambda_max(const GameParams& p, const LambdaMaxOptions& opts) {
  require_regime(p, Regime::Algebraic, "lambda_max");
  if (opts.mesh_size < 3) throw ValidationError("lambda_max: mesh_size must be >= 3");
  const CentralDomain D = central_domain(p);
  const double llo = std::log(D.lo);
  const double lhi = std::log(D.hi);
  const int n = opts.mesh_size;

  MarginScan scan;
  scan.kappa = p.kappa();
  scan.rho = p.rho();
  scan.grid.resize(static_cast<std::size_t>(n));
  scan.margin.resize(static_cast<std::size_t>(n));
  std::vector<double> bounds(static_cast<std::size_t>(n));
  std::vector<int> steps(static_cast<std::size_t>(n));
  // Open at lo, closed at hi.
  for (int i = 0; i < n; ++i) {
    scan.grid[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i + 1) / n);
  }
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        const MarginEval e = mina_margin_eval(p, scan.grid[i], opts.rel_tol, opts.min_half_len);
        scan.margin[i] = e.margin;
        bounds[i] = e.bound;
        steps[i] = std::max(e.steps_neg, e.steps_pos);
      },
      opts.threads);

  const auto best = static_cast<std::size_t>(
      std::max_element(scan.margin.begin(), scan.margin.end()) - scan.margin.begin());
  scan.lambda_max = scan.margin[best];
  scan.argmax_x = scan.grid[best];
  scan.bound = *std::max_element(bounds.begin(), bounds.end());
  scan.truncation = *std::max_element(steps.begin(), steps.end());

  const double a = best == 0 ? llo : std::log(scan.grid[best - 1]);
  const double b = std::log(scan.grid[std::min(best + 1, scan.grid.size() - 1)]);
  double refine_bound = 0.0;
  const GoldenResult g = golden_max(
      [&](double lx) {
        const MarginEval e = mina_margin_eval(p, std::exp(lx), opts.rel_tol, opts.min_half_len);
        refine_bound = std::max(refine_bound, e.bound);
        return e.margin;
      },
      a, b, opts.x_tol / std::max(1.0, scan.argmax_x));
  scan.bound = std::max(scan.bound, refine_bound);
  if (g.fx > scan.lambda_max) {
    scan.lambda_max = g.fx;
    scan.argmax_x = std::exp(g.x);
  }

  if (opts.find_roots) {
    auto f = [&](double lx) {
      return mina_margin_eval(p, std::exp(lx), opts.rel_tol, opts.min_half_len).margin - 1.0;
    };
    for (std::size_t i = 0; i + 1 < scan.grid.size(); ++i) {
      const double f0 = scan.margin[i] - 1.0;
      const double f1 = scan.margin[i + 1] - 1.0;
      if (f0 == 0.0) {
        scan.roots_of_one.push_back(scan.grid[i]);
      } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
        scan.roots_of_one.push_back(std::exp(
            bracket_root(f, std::log(scan.grid[i]), std::log(scan.grid[i + 1]), 1e-12)));
      }
    }
    if (scan.margin.back() - 1.0 == 0.0) scan.roots_of_one.push_back(scan.grid.back());
  }
  return scan;
}

std::vector<double> margin_roots(const GameParams& p, int j, int k, double x_lo, double x_hi,
                                 int mesh) {
  if (!(x_lo > 0.0) || !(x_lo < x_hi) || !std::isfinite(x_hi)) {
    throw ValidationError("margin_roots: need 0 < x_lo < x_hi < inf");
  }
  if (mesh < 2) throw ValidationError("margin_roots: mesh must be >= 2");
  const double llo = std::log(x_lo);
  const double lhi = std::log(x_hi);
  std::vector<double> lx(static_cast<std::size_t>(mesh) + 1);
  std::vector<double> fv(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    lx[i] = llo + (lhi - llo) * static_cast<double>(i) / mesh;
  }
  auto f = [&](double l) { return finite_margin(p, std::exp(l), j, k) - 1.0; };
  parallel_for(lx.size(), [&](std::size_t i) { fv[i] = f(lx[i]); });

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < lx.size(); ++i) {
    double root;
    if (fv[i] == 0.0) {
      root = std::exp(lx[i]);
    } else if (fv[i + 1] != 0.0 && (fv[i] < 0.0) != (fv[i + 1] < 0.0)) {
      root = std::exp(bracket_root(f, lx[i], lx[i + 1], 1e-13));
    } else {
      continue;
    }
    roots.push_back(root);
  }
  if (fv.back() == 0.0) roots.push_back(x_hi);

  // The scan interval is open: drop roots sitting on its ends, then merge.
  constexpr double kMerge = 1e-8;
  std::vector<double> out;
  for (double r : roots) {
    if (std::fabs(r - x_lo) <= kMerge * x_lo || std::fabs(r - x_hi) <= kMerge * x_hi) continue;
    if (!out.empty() && std::fabs(r - out.back()) <= kMerge * r) continue;
    out.push_back(r);
  }
  return out;
}

DipSearch lambda_dip(const std::function<GameParams(double)>& family, double t_lo,
                     double t_hi, int coarse, double t_tol, const LambdaMaxOptions& opts) {
  if (!(t_lo < t_hi) || coarse < 3) {
    throw ValidationError("lambda_dip: need t_lo < t_hi and at least 3 coarse points");
  }
  DipSearch d;
  d.t_grid.resize(static_cast<std::size_t>(coarse));
  d.excess_grid.resize(static_cast<std::size_t>(coarse));
  for (int i = 0; i < coarse; ++i) {
    d.t_grid[static_cast<std::size_t>(i)] = t_lo + (t_hi - t_lo) * i / (coarse - 1);
  }
  // Parallelism lives inside lambda_max.
  for (std::size_t i = 0; i < d.t_grid.size(); ++i) {
    d.excess_grid[i] = lambda_max(family(d.t_grid[i]), opts).lambda_max - 1.0;
  }
  // Deepest interior local minimum of the coarse grid. lambda_max - 1 also
  // shrinks towards some ends of a family (kappa -> 0), which is not a dip.
  const std::vector<double>& e = d.excess_grid;
  std::size_t best = e.size();
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    if (e[i] <= e[i - 1] && e[i] <= e[i + 1] && (best == e.size() || e[i] < e[best])) best = i;
  }
  if (best == e.size()) {
    best = static_cast<std::size_t>(std::min_element(e.begin(), e.end()) - e.begin());
  }
  d.bracket_lo = d.t_grid[best == 0 ? 0 : best - 1];
  d.bracket_hi = d.t_grid[std::min(best + 1, d.t_grid.size() - 1)];

  const GoldenResult g = golden_max(
      [&](double t) { return -(lambda_max(family(t), opts).lambda_max - 1.0); }, d.bracket_lo,
      d.bracket_hi, t_tol);
  double t_star = g.x;
  if (-g.fx > d.excess_grid[best]) t_star = d.t_grid[best];
  const MarginScan at = lambda_max(family(t_star), opts);
  d.argmin = t_star;
  d.excess = at.lambda_max - 1.0;
  d.bound = at.bound;
  d.argmax_x = at.argmax_x;
  d.within_bound = d.excess <= d.bound;
  return d;
}

AsymptoticFit asymptotic_fit(const AbmnWindow& w, const AsymptoticOptions& opts) {
  const GameParams& p = w.params();
  const double k = p.kappa();
  const double r = p.rho();
  if (w.battlefield() != 0) throw ValidationError("asymptotic_fit: battlefield index must be 0");
  if (r > 1.0) throw ValidationError("asymptotic_fit: needs rho <= 1");
  AsymptoticFit out;

  if (k == 1.0) {
    if (!(r < 1.0)) throw ValidationError("asymptotic_fit: kappa = 1 needs rho < 1");
    const int top = w.hi() - 2;
    if (top < 50) throw ValidationError("asymptotic_fit: forward tail shorter than 50 sites");
    // Half the mean second difference of ln m_{i,i+1} over the upper half.
    double acc = 0.0;
    int cnt = 0;
    for (int i = top / 2 + 1; i <= top - 1; ++i) {
      acc += w.log_m_inc(i + 1) - 2.0 * w.log_m_inc(i) + w.log_m_inc(i - 1);
      ++cnt;
    }
    out.quad_rate = 0.5 * acc / cnt;
    out.quad_rate_expected = 0.5 * r * std::log((1.0 - r) / (1.0 + r));
    return out;
  }

  const int deep = -w.lo() - 1;  // largest i with m_{-i-1,-i} in the window
  if (deep < 50) throw ValidationError("asymptotic_fit: backward tail shorter than 50 sites");
  const int i = std::min(opts.i_eval, deep);
  out.i_eval = i;
  out.ratio = std::exp(w.log_n_inc(-i - 1) - w.log_m_inc(-i - 1));
  out.ratio_predicted =
      std::pow(8.0 * r * r * k / (1.0 - k * k), 1.0 / r) * std::pow(static_cast<double>(i), 1.0 / r);
  out.ratio_normalized = out.ratio / out.ratio_predicted;
  if (-i > w.lo()) {
    out.stake_ratio = std::exp(w.log_b(-i) - w.log_a(-i));
    out.stake_ratio_normalized = out.stake_ratio / out.ratio_predicted;
  }

  const int from = std::min(opts.fit_from, deep - 10);
  const int to = std::min(opts.fit_to, deep);
  std::vector<double> xs, ys;
  for (int j = from; j <= to; ++j) {
    xs.push_back(static_cast<double>(j));
    ys.push_back(w.log_m_inc(-j - 1));
  }
  out.rate = fit_line(xs, ys).slope;
  out.rate_expected = std::log((1.0 - k) / (1.0 + k));
  out.rate_rel_err = std::fabs(out.rate - out.rate_expected) / std::fabs(out.rate_expected);
  return out;
}

}  // namespace tlp
