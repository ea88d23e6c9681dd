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
#include <string>
#include <vector>

#include "output.hpp"

namespace tlp::cli {

struct AbmnOptions {
  double kappa = 1.0;
  double rho = 1.0;
  double x = 1.0;
  int half_len = 40;
  bool standard = false;
};

struct LambdaMaxCmdOptions {
  std::string figure;
  std::vector<double> kappa;
  std::vector<double> rho;
  int mesh = 512;
  double tol = 1e-14;
  int min_half_len = 60;
  bool roots = false;
  bool locus = false;
  std::vector<double> range;  // locus scan interval; empty picks a default
  int coarse = 51;
  double t_tol = 1e-6;
};

struct MarginOptions {
  std::string figure;
  double kappa = 0.9;
  double rho = 1.0;
  int j = 9;
  int k = 9;
  double x_lo = 1.0;
  double x_hi = 145.0;
  int points = 2000;
  bool roots = false;
  int root_mesh = 4096;
};

struct OdeOptions {
  std::string figure;
  double rho = 1.0;
  double x = 1.0;
  double r_lo = -3.0;
  double r_hi = 3.0;
  double step = 0.01;
  double tol = 1e-10;
};

struct SimulateOptions {
  std::string mode = "tlp";
  double kappa = 0.5;
  double rho = 1.0;
  double x = 1.0;
  int start = 0;
  long paths = 10000;
  std::uint64_t seed = 1;
  int half_len = 60;
  int radius = 50;
  long max_turns = 1'000'000;
  double z0 = 0.0;
  double horizon = 5.0;
  double dt = 0.01;
  bool zero_drift = false;
  std::vector<double> kappas{0.1, 0.05, 0.025};
  std::vector<double> r_points{-1.0, 0.5, 2.0};
};

void to_json(Json& j, const AbmnOptions& o);
void from_json(const Json& j, AbmnOptions& o);
void to_json(Json& j, const LambdaMaxCmdOptions& o);
void from_json(const Json& j, LambdaMaxCmdOptions& o);
void to_json(Json& j, const MarginOptions& o);
void from_json(const Json& j, MarginOptions& o);
void to_json(Json& j, const OdeOptions& o);
void from_json(const Json& j, OdeOptions& o);
void to_json(Json& j, const SimulateOptions& o);
void from_json(const Json& j, SimulateOptions& o);

Artifacts run_abmn(const AbmnOptions& o);
Artifacts run_lambda_max(const LambdaMaxCmdOptions& o);
Artifacts run_margin(const MarginOptions& o);
Artifacts run_ode(const OdeOptions& o);
Artifacts run_simulate(const SimulateOptions& o);

// Applies a figure preset in place; unknown names are a validation error.
void apply_preset(LambdaMaxCmdOptions& o);
void apply_preset(MarginOptions& o);
void apply_preset(OdeOptions& o);

// Dispatches on a manifest's command name with its stored parameters.
Artifacts run_from_params(const std::string& command, const Json& params);

}  // namespace tlp::cli
