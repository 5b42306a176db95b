// SPDX-License-Identifier: Apache-2.0
//
// csiregion - joint uplink/downlink rate regions under imperfect CSI
// Copyright (C) 2026 csiregion contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Test-side oracles, independent of the implementation paths they check.

#pragma once

#include <armadillo>
#include <cstddef>
#include <vector>

#include "csiregion/capacity.hpp"
#include "csiregion/region.hpp"

namespace csiregion::oracles {

/// Truncated power series for J0 in quad precision (default 60 terms); the
/// series alternates with huge intermediate terms, so the accumulation runs
/// in __float128 to keep the final double accurate.
double bessel_j0_series(double x, int terms = 60);

/// Brute-force O(n^2) weak-dominance frontier over (net_ul, net_dl).
std::vector<std::size_t> pareto_bruteforce(const std::vector<region::RatePoint>& points);

/// Exhaustive grid search of the uplink power box [0, p_max]^K, refined
/// around the best cell a few times. K = 2 only.
double ul_grid_oracle(const capacity::EffectiveUplink& eff, double sigma_ul, double p_max,
                      int coarse = 101, int refinements = 3);

/// Exhaustive simplex grid search of the dual downlink powers
/// (p1, p2 >= 0, p1 + p2 <= p_tot), refined around the best cell. K = 2 only.
double dl_grid_oracle(const capacity::EffectiveDownlink& eff, double sigma_dl, double p_tot,
                      int coarse = 101, int refinements = 3);

/// Raw uplink objective log2 |I + Phi^-1 H P H^H| at a fixed allocation.
double ul_objective_at(const capacity::EffectiveUplink& eff, double sigma_ul,
                       const arma::vec& powers);

/// Raw downlink dual objective at a fixed allocation.
double dl_objective_at(const capacity::EffectiveDownlink& eff, double sigma_dl,
                       const arma::vec& powers);

} // namespace csiregion::oracles
