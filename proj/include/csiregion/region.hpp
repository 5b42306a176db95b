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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csiregion/config.hpp"
#include "csiregion/pilots.hpp"

namespace csiregion::region {

enum class DlMode { Auto, Spatial, Tdm };
std::string to_string(DlMode mode);
DlMode dl_mode_from_string(const std::string& name);
std::string to_string(feedback::FeedbackMode mode);

/// Parameter tuple of one operating point. Ids are stable strings used as
/// the final tie-break ordering and as join keys across runs.
struct OperatingParams {
    std::string ul_pattern;
    std::string dl_pattern;
    double rho_ul = 0.0;
    double rho_dl = 0.0;
    double n_b = 0.0;
    DlMode dl_mode = DlMode::Auto;
    feedback::FeedbackMode fb_mode = feedback::FeedbackMode::Redundant;

    std::string id() const;
};

/// Gross and net UL/DL sum rates of one parameter tuple, averaged over the
/// shared realization set. Net rates never exceed gross rates and are
/// clamped at zero; points whose CSI chain was unusable or whose net UL went
/// negative are flagged infeasible.
struct RatePoint {
    OperatingParams params;
    double gross_ul = 0.0;
    double gross_dl = 0.0;
    double net_ul = 0.0;
    double net_dl = 0.0;
    std::size_t realization_count = 0;
    bool feasible = true;
    bool pareto = false;
    bool hull = false;
};

struct NetRates {
    double ul = 0.0;
    double dl = 0.0;
};

/// Net-rate accounting: the uplink pays K rho_ul pilot overhead plus
/// N_b N_BS K feedback bits per PRB; the downlink pays (N_BS + K) rho_dl
/// under spatial multiplexing and rho_dl under TDM. dl_mode must be concrete.
NetRates net_rates(double gross_ul, double gross_dl, const OperatingParams& params,
                   const channel::PrbGeometry& geom, unsigned n_bs, unsigned k);

/// Grid-indexed map from (rho_ul, rho_dl, N_b, v, tau_max) to the CSI
/// quality variances. Values are finite; unusable links carry the sentinel.
struct LookupTable {
    std::vector<double> rho_ul;
    std::vector<double> rho_dl;
    std::vector<double> n_b;
    std::vector<double> v_kmh;
    std::vector<double> tau_max_us;
    std::vector<feedback::CsiQuality> values; // row-major in the axis order above

    std::size_t flat_index(std::size_t i_rho_ul, std::size_t i_rho_dl, std::size_t i_n_b,
                           std::size_t i_v, std::size_t i_tau) const;
    /// Nearest grid node per axis (ties toward the lower node).
    const feedback::CsiQuality& nearest(double rho_ul_q, double rho_dl_q, double n_b_q,
                                        double v_kmh_q, double tau_us_q) const;
    std::string to_json() const;
    static LookupTable from_json(const std::string& text);
};

/// Builds the full grid deterministically; unusable links are recorded as
/// sentinel values that force zero rate downstream.
LookupTable build_lookup(const config::SystemConfig& system,
                         const std::vector<pilots::PilotPattern>& ul_patterns,
                         const std::vector<pilots::PilotPattern>& dl_patterns,
                         const std::vector<double>& n_b_grid,
                         const std::vector<double>& v_kmh_grid,
                         const std::vector<double>& tau_us_grid, unsigned threads);

/// Gross rates for one point, Monte Carlo averaged over `realizations`
/// channel draws derived from `seed` (shared across points; independent of
/// worker counts). With DlMode::Auto both downlink routes are evaluated and
/// the one with the larger net rate is reported.
RatePoint evaluate_operating_point(const config::SystemConfig& system,
                                   const OperatingParams& params, const LookupTable& lookup,
                                   std::size_t realizations, std::uint64_t seed);

/// One RatePoint per (ul_pattern x dl_pattern x N_b x dl_mode) combination;
/// DlMode::Auto enumerates both concrete modes. Pareto and hull flags are
/// set on the returned points.
std::vector<RatePoint> sweep(const config::SystemConfig& system,
                             const std::vector<pilots::PilotPattern>& ul_patterns,
                             const std::vector<pilots::PilotPattern>& dl_patterns,
                             const std::vector<double>& n_b_grid, const LookupTable& lookup,
                             DlMode dl_mode, std::size_t realizations, std::uint64_t seed,
                             unsigned threads);

/// Indices of the points not weakly dominated in (net UL, net DL); exact
/// duplicates keep the lexicographically smallest param id.
std::vector<std::size_t> pareto_frontier(const std::vector<RatePoint>& points);

/// Vertex of the upper-right convex hull over the frontier plus the axis
/// anchors (max net UL, 0) and (0, max net DL); the anchors carry no point
/// index. Collinear interior vertices are dropped.
struct HullVertex {
    double net_ul = 0.0;
    double net_dl = 0.0;
    std::optional<std::size_t> point_index;
};
std::vector<HullVertex> convex_region(const std::vector<RatePoint>& points);

/// argmax of w net_UL + (1 - w) net_DL. Objective ties fall back to the
/// larger net_UL + net_DL, then smaller N_b, smaller rho_DL, smaller id.
std::size_t weighted_optimum(const std::vector<RatePoint>& points, double weight);

/// CSV with the mandatory header, '.' decimal separator, LF line ends and
/// shortest round-trip number formatting (byte-stable across runs).
std::string to_csv(const std::vector<RatePoint>& points);

} // namespace csiregion::region
