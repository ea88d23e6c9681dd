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

#include <string>

namespace tlp {

// Which parameter regime an operation needs. `Algebraic` is the region
// W = {rho^2 kappa <= 1}, where the ABMN algebra is valid; `Game` is the unit
// box (0,1]^2, where ABMN solutions are Nash equilibria of the trail game.
enum class Regime { Algebraic, Game };

// The pair (kappa, rho): kappa in (0,1] is the probability that a turn is
// decided by stakes, rho in (0,inf) is the Tullock exponent. Validated once at
// construction and immutable afterwards.
class GameParams {
 public:
  GameParams(double kappa, double rho);

  double kappa() const noexcept { return kappa_; }
  double rho() const noexcept { return rho_; }

  bool in_region_w() const noexcept;
  bool in_unit_box() const noexcept;

  std::string to_string() const;

  friend bool operator==(const GameParams&, const GameParams&) = default;

 private:
  double kappa_;
  double rho_;
};

// True iff rho^2 kappa <= 1.
bool in_region_w(const GameParams& p) noexcept;

// Throws ValidationError when `p` lies outside the requested regime. `what`
// names the calling operation for the message.
void require_regime(const GameParams& p, Regime regime, const char* what);

// The central domain D = ((2 - kappa rho)/(2 + kappa rho), (2 + kappa rho)/(2 - kappa rho)].
// Open at `lo`, closed at `hi`; lo * hi == 1.
struct CentralDomain {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return x > lo && x <= hi; }
};

// Throws ValidationError if kappa * rho >= 2.
CentralDomain central_domain(const GameParams& p);

}  // namespace tlp
