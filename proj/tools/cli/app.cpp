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

#include "app.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"
#include "tlp/error.hpp"

#ifndef TLP_VERSION
#define TLP_VERSION "0.0.0"
#endif

namespace tlp::cli {

std::string tool_version() { return TLP_VERSION; }

namespace {

struct Globals {
  std::string out_dir = ".";
  bool no_write = false;
};

int emit(const std::string& command, const Json& params, Artifacts a, const Globals& g,
         std::ostream& out) {
  finalize(a);
  const Json manifest = make_manifest(command, params, a, tool_version());
  out << a.report;
  if (!g.no_write) {
    for (const auto& path : write_all(g.out_dir, a, manifest)) out << "wrote " << path.string() << "\n";
  }
  out << "digest " << manifest["digest"]["value"].get<std::string>() << "\n";
  return kExitOk;
}

int replay(const std::string& path, const Globals& g, bool write, std::ostream& out,
           std::ostream& err) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open manifest " + path);
  Json m;
  try {
    m = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("schema_version") || m["schema_version"] != kManifestSchemaVersion) {
    throw ValidationError("unsupported manifest schema_version");
  }
  const std::string command = m.at("command").get<std::string>();
  Artifacts a = run_from_params(command, m.at("params"));
  finalize(a);
  const std::string expect = m.at("digest").at("value").get<std::string>();
  const std::string got = hex64(digest(a.files));
  if (write) {
    const Json fresh = make_manifest(command, m.at("params"), a, tool_version());
    for (const auto& p : write_all(g.out_dir, a, fresh)) out << "wrote " << p.string() << "\n";
  }
  if (got != expect) {
    err << "replay: digest mismatch, manifest " << expect << ", recomputed " << got << "\n";
    return kExitIntegrity;
  }
  out << "replay: digest " << got << " reproduced\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of the trail of lost pennies and its Brownian limit", "tlp"};
  app.set_version_flag("--version", tool_version());
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--no-write", g.no_write, "Print results without writing files");

  std::function<int()> action;

  AbmnOptions abmn;
  auto* c_abmn = app.add_subcommand("abmn", "Explicit ABMN window: stakes, values, residuals");
  c_abmn->add_option("--kappa", abmn.kappa, "Stake probability in (0, 1]")->capture_default_str();
  c_abmn->add_option("--rho", abmn.rho, "Tullock exponent, rho^2 kappa <= 1")->capture_default_str();
  c_abmn->add_option("--x", abmn.x, "Central ratio phi_0 > 0")->capture_default_str();
  c_abmn->add_option("--half-len", abmn.half_len, "Window half-length (>= 2)")->capture_default_str();
  c_abmn->add_flag("--standard", abmn.standard, "Rescale so that m_inf = 1");
  c_abmn->callback([&] { action = [&] { return emit("abmn", Json(abmn), run_abmn(abmn), g, out); }; });

  LambdaMaxCmdOptions lm;
  auto* c_lm = app.add_subcommand("lambda-max", "Maximal Mina margin over the central domain");
  c_lm->add_option("--figure", lm.figure, "Preset: kappaisone");
  c_lm->add_option("--kappa", lm.kappa, "Comma-separated kappa values")->delimiter(',');
  c_lm->add_option("--rho", lm.rho, "Comma-separated rho values")->delimiter(',');
  c_lm->add_option("--mesh", lm.mesh, "Log-uniform mesh size")->capture_default_str();
  c_lm->add_option("--tol", lm.tol, "Relative tail tolerance")->capture_default_str();
  c_lm->add_option("--min-half-len", lm.min_half_len, "Minimum orbit steps per side")
      ->capture_default_str();
  c_lm->add_flag("--roots", lm.roots, "Also report mesh roots of M = 1");
  c_lm->add_flag("--locus", lm.locus, "Minimize lambda_max - 1 along the free parameter");
  c_lm->add_option("--range", lm.range, "Locus scan interval lo,hi")->delimiter(',');
  c_lm->add_option("--coarse", lm.coarse, "Locus coarse grid size")->capture_default_str();
  c_lm->add_option("--t-tol", lm.t_tol, "Locus golden-section tolerance")->capture_default_str();
  c_lm->callback(
      [&] { action = [&] { return emit("lambda-max", Json(lm), run_lambda_max(lm), g, out); }; });

  MarginOptions mg;
  auto* c_mg = app.add_subcommand("margin", "Finite-trail Mina margin map and its roots");
  c_mg->add_option("--figure", mg.figure, "Preset: mmm");
  c_mg->add_option("--kappa", mg.kappa)->capture_default_str();
  c_mg->add_option("--rho", mg.rho)->capture_default_str();
  c_mg->add_option("--j", mg.j, "Increments below the centre pair")->capture_default_str();
  c_mg->add_option("--k", mg.k, "Increments above the centre pair")->capture_default_str();
  c_mg->add_option("--x-lo", mg.x_lo)->capture_default_str();
  c_mg->add_option("--x-hi", mg.x_hi)->capture_default_str();
  c_mg->add_option("--points", mg.points, "Log-uniform scan points on (x-lo, x-hi]")
      ->capture_default_str();
  c_mg->add_flag("--roots", mg.roots, "Locate and print the roots of M = 1");
  c_mg->add_option("--root-mesh", mg.root_mesh)->capture_default_str();
  c_mg->callback([&] { action = [&] { return emit("margin", Json(mg), run_margin(mg), g, out); }; });

  OdeOptions ode;
  auto* c_ode = app.add_subcommand("ode", "Brownian Boost flow, ODE pair and stake profiles");
  c_ode->add_option("--figure", ode.figure, "Preset: odepair");
  c_ode->add_option("--rho", ode.rho)->capture_default_str();
  c_ode->add_option("--x", ode.x)->capture_default_str();
  c_ode->add_option("--r-lo", ode.r_lo)->capture_default_str();
  c_ode->add_option("--r-hi", ode.r_hi)->capture_default_str();
  c_ode->add_option("--step", ode.step)->capture_default_str();
  c_ode->add_option("--tol", ode.tol, "Quadrature tolerance")->capture_default_str();
  c_ode->callback([&] { action = [&] { return emit("ode", Json(ode), run_ode(ode), g, out); }; });

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo gameplay and SDE paths");
  c_sim->add_option("--mode", sim.mode, "tlp, sde or scaled-check")
      ->check(CLI::IsMember({"tlp", "sde", "scaled-check"}))
      ->capture_default_str();
  c_sim->add_option("--kappa", sim.kappa)->capture_default_str();
  c_sim->add_option("--rho", sim.rho)->capture_default_str();
  c_sim->add_option("--x", sim.x)->capture_default_str();
  c_sim->add_option("--start", sim.start, "Starting site")->capture_default_str();
  c_sim->add_option("--paths", sim.paths)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--half-len", sim.half_len, "Stake window half-length")->capture_default_str();
  c_sim->add_option("--radius", sim.radius, "Escape radius")->capture_default_str();
  c_sim->add_option("--max-turns", sim.max_turns)->capture_default_str();
  c_sim->add_option("--z0", sim.z0)->capture_default_str();
  c_sim->add_option("--horizon", sim.horizon)->capture_default_str();
  c_sim->add_option("--dt", sim.dt)->capture_default_str();
  c_sim->add_flag("--zero-drift", sim.zero_drift, "SDE without drift");
  c_sim->add_option("--kappas", sim.kappas, "scaled-check kappa sequence")->delimiter(',');
  c_sim->add_option("--r-points", sim.r_points, "scaled-check positions")->delimiter(',');
  c_sim->callback(
      [&] { action = [&] { return emit("simulate", Json(sim), run_simulate(sim), g, out); }; });

  std::string manifest_path;
  bool replay_write = false;
  auto* c_rep = app.add_subcommand("replay", "Re-run a manifest and compare its digest");
  c_rep->add_option("manifest", manifest_path, "Path to a *.manifest.json")->required();
  c_rep->add_flag("--write", replay_write, "Also write the regenerated files to --out");
  c_rep->callback([&] {
    action = [&] { return replay(manifest_path, g, replay_write, out, err); };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const IntegrityError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace tlp::cli
