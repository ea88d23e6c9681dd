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

#include "tlp/params.hpp"

#include <cmath>
#include <sstream>

#include "tlp/error.hpp"

namespace tlp {

GameParams::GameParams(double kappa, double rho) : kappa_(kappa), rho_(rho) {
  if (!std::isfinite(kappa) || !(kappa > 0.0) || kappa > 1.0) {
    std::ostringstream os;
    os << "kappa must lie in (0, 1], got " << kappa;
    throw ValidationError(os.str());
  }
  if (!std::isfinite(rho) || !(rho > 0.0)) {
    std::ostringstream os;
    os << "rho must be finite and > 0, got " << rho;
    throw ValidationError(os.str());
  }
}

bool GameParams::in_region_w() const noexcept {
  return rho_ * rho_ * kappa_ <= 1.0;
}

bool GameParams::in_unit_box() const noexcept { return rho_ <= 1.0; }

std::string GameParams::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "(kappa=" << kappa_ << ", rho=" << rho_ << ")";
  return os.str();
}

bool in_region_w(const GameParams& p) noexcept { return p.in_region_w(); }

void require_regime(const GameParams& p, Regime regime, const char* what) {
  const bool ok = regime == Regime::Game ? p.in_unit_box() : p.in_region_w();
  if (ok) return;
  std::ostringstream os;
  os << what << ": parameters " << p.to_string() << " lie outside "
     << (regime == Regime::Game ? "the unit box (0,1]^2"
                                : "the region rho^2 kappa <= 1");
  throw ValidationError(os.str());
}

CentralDomain central_domain(const GameParams& p) {
  const double kr = p.kappa() * p.rho();
  if (!(kr < 2.0)) {
    std::ostringstream os;
    os << "central domain needs kappa*rho < 2, got " << kr;
    throw ValidationError(os.str());
  }
  return CentralDomain{(2.0 - kr) / (2.0 + kr), (2.0 + kr) / (2.0 - kr)};
}

}  // namespace tlp
