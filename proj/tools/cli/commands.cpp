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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlp/abmn.hpp"
#include "tlp/bboost.hpp"
#include "tlp/error.hpp"
#include "tlp/numerics.hpp"
#include "tlp/params.hpp"
#include "tlp/sim.hpp"

namespace tlp::cli {

namespace {

template <class T>
void read(const Json& j, const char* key, T& v) {
  if (const auto it = j.find(key); it != j.end()) it->get_to(v);
}

std::string line(const std::string& key, double v) { return key + " " + format_real(v) + "\n"; }

Json real_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double d : v) a.push_back(d);
  return a;
}

}  // namespace

void to_json(Json& j, const AbmnOptions& o) {
  j = Json{{"kappa", o.kappa}, {"rho", o.rho}, {"x", o.x}, {"half_len", o.half_len},
           {"standard", o.standard}};
}
void from_json(const Json& j, AbmnOptions& o) {
  read(j, "kappa", o.kappa);
  read(j, "rho", o.rho);
  read(j, "x", o.x);
  read(j, "half_len", o.half_len);
  read(j, "standard", o.standard);
}

void to_json(Json& j, const LambdaMaxCmdOptions& o) {
  j = Json{{"figure", o.figure}, {"kappa", o.kappa},   {"rho", o.rho},
           {"mesh", o.mesh},     {"tol", o.tol},       {"min_half_len", o.min_half_len},
           {"roots", o.roots},   {"locus", o.locus},   {"range", o.range},
           {"coarse", o.coarse}, {"t_tol", o.t_tol}};
}
void from_json(const Json& j, LambdaMaxCmdOptions& o) {
  read(j, "figure", o.figure);
  read(j, "kappa", o.kappa);
  read(j, "rho", o.rho);
  read(j, "mesh", o.mesh);
  read(j, "tol", o.tol);
  read(j, "min_half_len", o.min_half_len);
  read(j, "roots", o.roots);
  read(j, "locus", o.locus);
  read(j, "range", o.range);
  read(j, "coarse", o.coarse);
  read(j, "t_tol", o.t_tol);
}

void to_json(Json& j, const MarginOptions& o) {
  j = Json{{"figure", o.figure}, {"kappa", o.kappa},   {"rho", o.rho},
           {"j", o.j},           {"k", o.k},           {"x_lo", o.x_lo},
           {"x_hi", o.x_hi},     {"points", o.points}, {"roots", o.roots},
           {"root_mesh", o.root_mesh}};
}
void from_json(const Json& j, MarginOptions& o) {
  read(j, "figure", o.figure);
  read(j, "kappa", o.kappa);
  read(j, "rho", o.rho);
  read(j, "j", o.j);
  read(j, "k", o.k);
  read(j, "x_lo", o.x_lo);
  read(j, "x_hi", o.x_hi);
  read(j, "points", o.points);
  read(j, "roots", o.roots);
  read(j, "root_mesh", o.root_mesh);
}

void to_json(Json& j, const OdeOptions& o) {
  j = Json{{"figure", o.figure}, {"rho", o.rho},   {"x", o.x},    {"r_lo", o.r_lo},
           {"r_hi", o.r_hi},     {"step", o.step}, {"tol", o.tol}};
}
void from_json(const Json& j, OdeOptions& o) {
  read(j, "figure", o.figure);
  read(j, "rho", o.rho);
  read(j, "x", o.x);
  read(j, "r_lo", o.r_lo);
  read(j, "r_hi", o.r_hi);
  read(j, "step", o.step);
  read(j, "tol", o.tol);
}

void to_json(Json& j, const SimulateOptions& o) {
  j = Json{{"mode", o.mode},       {"kappa", o.kappa},       {"rho", o.rho},
           {"x", o.x},             {"start", o.start},       {"paths", o.paths},
           {"seed", o.seed},       {"half_len", o.half_len}, {"radius", o.radius},
           {"max_turns", o.max_turns}, {"z0", o.z0},         {"horizon", o.horizon},
           {"dt", o.dt},           {"zero_drift", o.zero_drift}, {"kappas", o.kappas},
           {"r_points", o.r_points}};
}
void from_json(const Json& j, SimulateOptions& o) {
  read(j, "mode", o.mode);
  read(j, "kappa", o.kappa);
  read(j, "rho", o.rho);
  read(j, "x", o.x);
  read(j, "start", o.start);
  read(j, "paths", o.paths);
  read(j, "seed", o.seed);
  read(j, "half_len", o.half_len);
  read(j, "radius", o.radius);
  read(j, "max_turns", o.max_turns);
  read(j, "z0", o.z0);
  read(j, "horizon", o.horizon);
  read(j, "dt", o.dt);
  read(j, "zero_drift", o.zero_drift);
  read(j, "kappas", o.kappas);
  read(j, "r_points", o.r_points);
}

void apply_preset(LambdaMaxCmdOptions& o) {
  if (o.figure.empty()) return;
  if (o.figure != "kappaisone") throw ValidationError("unknown lambda-max figure '" + o.figure + "'");
  o.kappa = {1.0};
  o.rho.clear();
  for (int i = 1; i < 40; ++i) o.rho.push_back(0.8 + 0.005 * i);
  o.locus = false;
}

void apply_preset(MarginOptions& o) {
  if (o.figure.empty()) return;
  if (o.figure != "mmm") throw ValidationError("unknown margin figure '" + o.figure + "'");
  o.kappa = 0.9;
  o.rho = 1.0;
  o.j = 9;
  o.k = 9;
  o.x_lo = 1.0;
  o.x_hi = 145.0;
}

void apply_preset(OdeOptions& o) {
  if (o.figure.empty()) return;
  if (o.figure != "odepair") throw ValidationError("unknown ode figure '" + o.figure + "'");
  o.rho = 1.0;
  o.x = 1.0;
  o.r_lo = -3.0;
  o.r_hi = 3.0;
  o.step = 0.01;
}

Artifacts run_abmn(const AbmnOptions& o) {
  const GameParams p(o.kappa, o.rho);
  const AbmnWindow w = o.standard ? standard_solution(p, o.x, o.half_len)
                                  : default_solution(p, o.x, o.half_len);
  Artifacts a;
  a.stem = "abmn";
  Csv csv({"i", "phi", "m", "n", "a", "b", "m_inc", "n_inc", "residual"});
  double worst = 0.0;
  for (int i = w.lo() + 1; i <= w.hi() - 1; ++i) {
    const double res = abmn_residual_at(w, i);
    worst = std::max(worst, res);
    csv.row({static_cast<long long>(i), w.phi(i), w.m(i), w.n(i), w.a(i), w.b(i),
             std::exp(w.log_m_inc(i)), std::exp(w.log_n_inc(i)), res});
  }
  a.files.push_back({a.stem + ".csv", csv.text()});
  a.summary = {{"kappa", o.kappa},
               {"rho", o.rho},
               {"x", o.x},
               {"normalization", o.standard ? "standard" : "default"},
               {"requested_half_len", w.requested_half_len()},
               {"lo", w.lo()},
               {"hi", w.hi()},
               {"truncated", w.truncated()},
               {"battlefield", w.battlefield()},
               {"m_inf_total", w.m_inf_total()},
               {"n_neg_inf_total", w.n_neg_inf_total()},
               {"margin", w.margin()},
               {"tail_bound", w.tail_bound()},
               {"max_residual", worst}};
  a.tolerances = {{"orbit_solve", kDefaultTol}};
  a.report = "window [" + std::to_string(w.lo()) + ", " + std::to_string(w.hi()) + "]" +
             (w.truncated() ? " (truncated)" : "") + "\n" + line("margin", w.margin()) +
             line("max_residual", worst);
  return a;
}

namespace {

LambdaMaxOptions lm_options(const LambdaMaxCmdOptions& o) {
  LambdaMaxOptions lo;
  lo.mesh_size = o.mesh;
  lo.rel_tol = o.tol;
  lo.min_half_len = o.min_half_len;
  lo.find_roots = o.roots;
  return lo;
}

Artifacts run_locus(const LambdaMaxCmdOptions& o) {
  const bool over_kappa = o.kappa.empty() && o.rho.size() == 1;
  const bool over_rho = o.rho.empty() && o.kappa.size() == 1;
  if (!over_kappa && !over_rho) {
    throw ValidationError("--locus needs exactly one of --kappa or --rho, with a single value");
  }
  std::vector<double> range = o.range;
  if (range.empty()) range = over_kappa ? std::vector<double>{0.5, 1.0} : std::vector<double>{0.9, 1.0};
  if (range.size() != 2 || !(range[0] < range[1])) {
    throw ValidationError("--range needs two increasing values");
  }
  const double fixed = over_kappa ? o.rho[0] : o.kappa[0];
  auto family = [&](double t) { return over_kappa ? GameParams(t, fixed) : GameParams(fixed, t); };
  const DipSearch d = lambda_dip(family, range[0], range[1], o.coarse, o.t_tol, lm_options(o));

  Artifacts a;
  a.stem = "lambda_locus";
  Csv csv({over_kappa ? "kappa" : "rho", "excess"});
  for (std::size_t i = 0; i < d.t_grid.size(); ++i) csv.row({d.t_grid[i], d.excess_grid[i]});
  a.files.push_back({a.stem + ".csv", csv.text()});
  a.summary = {{"family", over_kappa ? "kappa" : "rho"},
               {over_kappa ? "rho" : "kappa", fixed},
               {"range", real_array(range)},
               {"argmin", d.argmin},
               {"excess", d.excess},
               {"bound", d.bound},
               {"within_bound", d.within_bound},
               {"argmax_x", d.argmax_x},
               {"bracket", real_array({d.bracket_lo, d.bracket_hi})}};
  a.tolerances = {{"margin_rel_tol", o.tol}, {"t_tol", o.t_tol}};
  std::ostringstream os;
  os << "dip of lambda_max - 1 over " << (over_kappa ? "kappa" : "rho") << " in ["
     << format_real(d.bracket_lo) << ", " << format_real(d.bracket_hi) << "]\n"
     << line("argmin", d.argmin) << line("excess", d.excess) << line("bound", d.bound)
     << "within_bound " << (d.within_bound ? "true" : "false") << "\n";
  a.report = os.str();
  return a;
}

}  // namespace

Artifacts run_lambda_max(const LambdaMaxCmdOptions& in) {
  LambdaMaxCmdOptions o = in;
  apply_preset(o);
  if (o.locus) return run_locus(o);
  if (o.kappa.empty() || o.rho.empty()) throw ValidationError("lambda-max needs --kappa and --rho");
  Artifacts a;
  a.stem = o.figure.empty() ? "lambda_max" : o.figure;
  Csv csv({"kappa", "rho", "lambda_max", "argmax_x", "bound", "truncation"});
  Json points = Json::array();
  std::ostringstream os;
  for (double k : o.kappa) {
    for (double r : o.rho) {
      const MarginScan s = lambda_max(GameParams(k, r), lm_options(o));
      csv.row({k, r, s.lambda_max, s.argmax_x, s.bound, static_cast<long long>(s.truncation)});
      Json pt = {{"kappa", k},
                 {"rho", r},
                 {"lambda_max", s.lambda_max},
                 {"excess", s.lambda_max - 1.0},
                 {"argmax_x", s.argmax_x},
                 {"bound", s.bound}};
      if (o.roots) pt["roots_of_one"] = real_array(s.roots_of_one);
      points.push_back(pt);
      os << "kappa " << format_real(k) << " rho " << format_real(r) << " lambda_max "
         << format_real(s.lambda_max) << " bound " << format_real(s.bound) << "\n";
    }
  }
  a.files.push_back({a.stem + ".csv", csv.text()});
  a.summary = {{"points", points}};
  a.tolerances = {{"margin_rel_tol", o.tol}, {"x_tol", LambdaMaxOptions{}.x_tol}};
  a.report = os.str();
  return a;
}

Artifacts run_margin(const MarginOptions& in) {
  MarginOptions o = in;
  apply_preset(o);
  if (!(o.x_lo > 0.0) || !(o.x_lo < o.x_hi)) throw ValidationError("margin needs 0 < x-lo < x-hi");
  if (o.points < 1) throw ValidationError("margin needs --points >= 1");
  const GameParams p(o.kappa, o.rho);
  Artifacts a;
  a.stem = o.figure.empty() ? "margin" : o.figure;
  std::vector<double> xs(static_cast<std::size_t>(o.points)), ms(xs.size());
  const double llo = std::log(o.x_lo);
  const double lhi = std::log(o.x_hi);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i + 1) / o.points);
  }
  parallel_for(xs.size(), [&](std::size_t i) { ms[i] = finite_margin(p, xs[i], o.j, o.k); });
  Csv csv({"x", "margin"});
  for (std::size_t i = 0; i < xs.size(); ++i) csv.row({xs[i], ms[i]});
  a.files.push_back({a.stem + ".csv", csv.text()});
  a.summary = {{"kappa", o.kappa}, {"rho", o.rho}, {"j", o.j},
               {"k", o.k},         {"x_lo", o.x_lo}, {"x_hi", o.x_hi},
               {"points", o.points}};
  if (o.roots) {
    const std::vector<double> roots = margin_roots(p, o.j, o.k, o.x_lo, o.x_hi, o.root_mesh);
    a.summary["root_count"] = roots.size();
    a.summary["roots"] = real_array(roots);
    std::ostringstream os;
    os << roots.size() << " roots of M = 1 on (" << format_real(o.x_lo) << ", "
       << format_real(o.x_hi) << ")\n";
    for (double r : roots) os << format_real(r) << "\n";
    a.report = os.str();
  } else {
    a.report = "scanned " + std::to_string(o.points) + " points\n";
  }
  a.tolerances = {{"root_abs_tol_log_x", 1e-13}, {"root_merge_rel", 1e-8}};
  return a;
}

Artifacts run_ode(const OdeOptions& in) {
  OdeOptions o = in;
  apply_preset(o);
  if (!(o.step > 0.0) || !(o.r_lo < o.r_hi)) throw ValidationError("ode needs r-lo < r-hi and step > 0");
  const long n = std::lround(std::floor((o.r_hi - o.r_lo) / o.step + 1e-9)) + 1;
  std::vector<double> rs(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) rs[static_cast<std::size_t>(i)] = o.r_lo + o.step * static_cast<double>(i);
  std::vector<OdePairEval> ev(rs.size());
  std::vector<FlowEval> fl(rs.size());
  parallel_for(rs.size(), [&](std::size_t i) {
    ev[i] = ode_pair(o.rho, o.x, rs[i], o.tol);
    fl[i] = flow(o.rho, o.x, rs[i]);
  });

  Artifacts a;
  a.stem = o.figure.empty() ? "ode" : o.figure;
  Csv csv({"r", "S", "f", "g", "a", "b", "R", "g_over_f"});
  double gf_gap = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double gf = std::exp(ev[i].log_g - ev[i].log_f);
    gf_gap = std::max(gf_gap, std::fabs(gf - fl[i].s_value) / fl[i].s_value);
    if (ev[i].a > ev[best].a) best = i;
    csv.row({rs[i], fl[i].s_value, ev[i].f, ev[i].g, ev[i].a, ev[i].b,
             -std::tanh(0.5 * fl[i].log_j), gf});
  }
  a.files.push_back({a.stem + ".csv", csv.text()});

  const double lo = best > 0 ? rs[best - 1] : rs[best];
  const double hi = best + 1 < rs.size() ? rs[best + 1] : rs[best];
  const GoldenResult peak =
      golden_max([&](double r) { return ode_pair(o.rho, o.x, r, o.tol).a; }, lo, hi, 1e-9);
  const PrizeTotals tot = prize_totals(o.rho, o.x, o.tol);
  a.summary = {{"rho", o.rho},
               {"x", o.x},
               {"r_lo", o.r_lo},
               {"r_hi", o.r_hi},
               {"step", o.step},
               {"battlefield_point", battlefield_point(o.rho, o.x)},
               {"m_total", tot.m_total},
               {"n_total", tot.n_total},
               {"totals_window", tot.window},
               {"tail_bound", tot.tail_bound},
               {"a_max", peak.fx},
               {"a_argmax", peak.x},
               {"max_rel_gap_g_over_f_vs_S", gf_gap}};
  a.tolerances = {{"quadrature", o.tol}, {"argmax_r", 1e-9}};
  a.report = line("v", battlefield_point(o.rho, o.x)) + line("a_max", peak.fx) +
             line("a_argmax", peak.x) + line("m_total", tot.m_total) +
             line("n_total", tot.n_total);
  return a;
}

namespace {

Artifacts simulate_tlp(const SimulateOptions& o) {
  const GameParams p(o.kappa, o.rho);
  const AbmnWindow w = standard_solution(p, o.x, o.half_len);
  const StakeProfile prof = StakeProfile::from_window(w);
  SimConfig cfg;
  cfg.seed = o.seed;
  cfg.escape_radius = o.radius;
  cfg.max_turns = o.max_turns;
  cfg.m_neg_inf = 0.0;
  cfg.m_inf = 1.0;
  cfg.n_neg_inf = w.n_neg_inf_total();
  cfg.n_inf = 0.0;
  cfg.m_star = -1.0;
  cfg.n_star = -1.0;
  const std::vector<PathRecord> rec = play_tlp_paths(p, prof, o.start, cfg, o.paths);
  const TlpSummary s = summarize(rec);

  Artifacts a;
  a.stem = "simulate_tlp";
  Csv csv({"path", "outcome", "turns", "p_plus", "p_minus"});
  for (std::size_t i = 0; i < rec.size(); ++i) {
    csv.row({static_cast<long long>(i), std::string(to_string(rec[i].outcome)),
             static_cast<long long>(rec[i].turns), rec[i].p_plus, rec[i].p_minus});
  }
  a.files.push_back({a.stem + ".csv", csv.text()});
  const double np = static_cast<double>(s.paths);
  const bool inside = o.start > w.lo() && o.start < w.hi();
  a.summary = {{"kappa", o.kappa},
               {"rho", o.rho},
               {"x", o.x},
               {"start", o.start},
               {"paths", s.paths},
               {"frequencies",
                {{"left_escape", static_cast<double>(s.left) / np},
                 {"right_escape", static_cast<double>(s.right) / np},
                 {"unfinished", static_cast<double>(s.unfinished) / np}}},
               {"mean_p_plus", s.mean_p_plus},
               {"se_p_plus", s.se_p_plus},
               {"mean_p_minus", s.mean_p_minus},
               {"se_p_minus", s.se_p_minus},
               {"mean_turns", s.mean_turns},
               {"window_m", inside ? Json(w.m(o.start)) : Json(nullptr)},
               {"window_n", inside ? Json(w.n(o.start)) : Json(nullptr)},
               {"left_profile", s.left_profile}};
  a.seed = o.seed;
  a.has_seed = true;
  std::ostringstream os;
  os << "left " << s.left << " right " << s.right << " unfinished " << s.unfinished << "\n"
     << "mean_p_plus " << format_real(s.mean_p_plus) << " +- " << format_real(s.se_p_plus) << "\n"
     << "mean_p_minus " << format_real(s.mean_p_minus) << " +- " << format_real(s.se_p_minus)
     << "\n";
  a.report = os.str();
  return a;
}

Artifacts simulate_sde_mode(const SimulateOptions& o) {
  SdeOptions so;
  so.zero_drift = o.zero_drift;
  const std::vector<double> slopes = sde_slopes(o.rho, o.z0, o.horizon, o.dt, o.seed, o.paths, so);
  const SdeSummary s = summarize_sde(slopes);
  Artifacts a;
  a.stem = "simulate_sde";
  Csv csv({"path", "z_end", "slope"});
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    csv.row({static_cast<long long>(i), o.z0 + slopes[i] * o.horizon, slopes[i]});
  }
  a.files.push_back({a.stem + ".csv", csv.text()});
  a.summary = {{"rho", o.rho},         {"z0", o.z0},         {"horizon", o.horizon},
               {"dt", o.dt},           {"paths", s.paths},   {"zero_drift", o.zero_drift},
               {"mean_slope", s.mean_slope}, {"se_slope", s.se_slope},
               {"drift_at_z0", o.zero_drift ? 0.0 : drift(o.rho, o.z0)}};
  a.seed = o.seed;
  a.has_seed = true;
  a.report = line("mean_slope", s.mean_slope) + line("se_slope", s.se_slope);
  return a;
}

Artifacts simulate_scaled(const SimulateOptions& o) {
  if (o.kappas.empty() || o.r_points.empty()) throw ValidationError("scaled-check needs --kappas and --r-points");
  double reach = 0.0;
  for (double r : o.r_points) reach = std::max(reach, std::fabs(r));
  Artifacts a;
  a.stem = "simulate_scaled";
  Csv csv({"kappa", "r", "site", "discrete_stake", "continuum_stake", "stake_error",
           "discrete_drift", "continuum_drift"});
  std::vector<std::vector<double>> err(o.r_points.size());
  Json margins = Json::array();
  for (double k : o.kappas) {
    const GameParams p(k, o.rho);
    const int half = static_cast<int>(std::ceil(reach / k)) + 10;
    const AbmnWindow w = default_solution(p, o.x, half);
    const ScaledDriftReport rep = scaled_drift_check(p, o.x, w, o.r_points, 0, o.seed);
    margins.push_back(rep.margin);
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      const ScaledPoint& pt = rep.points[i];
      if (!pt.covered) throw ValidationError("scaled-check: r outside the window");
      csv.row({k, pt.u, static_cast<long long>(pt.site), pt.discrete_stake, pt.continuum_stake,
               pt.stake_error, pt.discrete_drift, pt.continuum_drift});
      err[i].push_back(pt.stake_error);
    }
  }
  a.files.push_back({a.stem + ".csv", csv.text()});
  // Successive error ratios; an O(kappa) error halves when kappa halves.
  Json table = Json::array();
  std::ostringstream os;
  os << "r";
  for (std::size_t c = 1; c < o.kappas.size(); ++c) os << " ratio" << c;
  os << "\n";
  for (std::size_t i = 0; i < o.r_points.size(); ++i) {
    Json ratios = Json::array();
    os << format_real(o.r_points[i]);
    for (std::size_t c = 1; c < err[i].size(); ++c) {
      const double q = err[i][c] / err[i][c - 1];
      ratios.push_back(q);
      os << " " << format_real(q);
    }
    os << "\n";
    table.push_back({{"r", o.r_points[i]}, {"errors", real_array(err[i])}, {"ratios", ratios}});
  }
  a.summary = {{"rho", o.rho},
               {"x", o.x},
               {"kappas", real_array(o.kappas)},
               {"richardson", table},
               {"margins", margins}};
  a.tolerances = {{"quadrature", kQuadTol}, {"orbit_solve", kDefaultTol}};
  a.report = os.str();
  return a;
}

}  // namespace

Artifacts run_simulate(const SimulateOptions& o) {
  if (o.mode == "tlp") return simulate_tlp(o);
  if (o.mode == "sde") return simulate_sde_mode(o);
  if (o.mode == "scaled-check") return simulate_scaled(o);
  throw ValidationError("unknown simulate mode '" + o.mode + "' (tlp, sde, scaled-check)");
}

Artifacts run_from_params(const std::string& command, const Json& params) {
  if (command == "abmn") return run_abmn(params.get<AbmnOptions>());
  if (command == "lambda-max") return run_lambda_max(params.get<LambdaMaxCmdOptions>());
  if (command == "margin") return run_margin(params.get<MarginOptions>());
  if (command == "ode") return run_ode(params.get<OdeOptions>());
  if (command == "simulate") return run_simulate(params.get<SimulateOptions>());
  throw ValidationError("manifest names unknown command '" + command + "'");
}

}  // namespace tlp::cli
