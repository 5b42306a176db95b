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

#include "csiregion/pilots.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace csiregion::pilots {

arma::uvec PilotPattern::stacked_indices() const {
    arma::uvec idx(positions.size());
    for (std::size_t p = 0; p < positions.size(); ++p)
        idx(p) = static_cast<arma::uword>(positions[p].first) * geometry.n_subcarriers +
                 positions[p].second;
    return idx;
}

PilotPattern lattice_pattern(const channel::PrbGeometry& geom, unsigned dt, unsigned df,
                             std::pair<unsigned, unsigned> offset) {
    geom.validate();
    if (dt == 0 || df == 0)
        throw std::invalid_argument("lattice_pattern: spacings must be >= 1");
    if (offset.first >= dt || offset.second >= df)
        throw std::invalid_argument("lattice_pattern: offset must lie inside (dt, df)");

    PilotPattern pattern;
    pattern.geometry = geom;
    pattern.dt = dt;
    pattern.df = df;
    pattern.offset = offset;
    for (unsigned t = offset.first; t < geom.n_symbols; t += dt)
        for (unsigned f = offset.second; f < geom.n_subcarriers; f += df)
            pattern.positions.emplace_back(t, f);
    std::sort(pattern.positions.begin(), pattern.positions.end());

    if (pattern.positions.empty())
        throw std::invalid_argument("lattice_pattern: lattice misses the PRB grid");

    pattern.id = "dt" + std::to_string(dt) + "df" + std::to_string(df);
    if (offset != std::pair<unsigned, unsigned>{0, 0})
        pattern.id += "o" + std::to_string(offset.first) + "-" + std::to_string(offset.second);
    return pattern;
}

arma::mat selection_matrix(const PilotPattern& pattern) {
    if (pattern.positions.empty())
        throw std::invalid_argument("selection_matrix: empty pattern");
    const arma::uvec idx = pattern.stacked_indices();
    arma::mat s(pattern.n_positions(), pattern.geometry.block_length(), arma::fill::zeros);
    for (arma::uword r = 0; r < idx.n_elem; ++r)
        s(r, idx(r)) = 1.0;
    return s;
}

std::vector<PilotPattern> default_catalog(const channel::PrbGeometry& geom) {
    // Densities 1,2,3,4,6,8,12,16,20,28 out of 168 on the default grid; the
    // 3-pilot entry matches the fixed density 0.017 grid point and the top
    // entries reach past 0.12.
    static constexpr std::pair<unsigned, unsigned> spacings[] = {
        {14, 12}, {14, 6}, {14, 4}, {7, 6}, {7, 4},
        {7, 3},  {7, 2},  {4, 3},  {3, 3}, {2, 3},
    };
    std::vector<PilotPattern> catalog;
    catalog.reserve(std::size(spacings));
    for (const auto& [dt, df] : spacings)
        catalog.push_back(lattice_pattern(geom, dt, df));
    return catalog;
}

std::string catalog_to_json(const std::vector<PilotPattern>& catalog) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : catalog) {
        arr.push_back({{"id", p.id},
                       {"dt", p.dt},
                       {"df", p.df},
                       {"offset", {p.offset.first, p.offset.second}},
                       {"density", p.density()}});
    }
    return arr.dump(2);
}

const PilotPattern& pattern_by_id(const std::vector<PilotPattern>& catalog,
                                  const std::string& id) {
    for (const auto& p : catalog)
        if (p.id == id)
            return p;
    throw std::invalid_argument("pattern_by_id: unknown pattern id '" + id + "'");
}

} // namespace csiregion::pilots
