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

#include <armadillo>
#include <string>
#include <utility>
#include <vector>

#include "csiregion/channel.hpp"

namespace csiregion::pilots {

/// Pilot layout inside one PRB. Positions are (symbol, subcarrier) pairs,
/// unique, in range and sorted; ids are stable strings so that sweep outputs
/// stay joinable across runs.
struct PilotPattern {
    channel::PrbGeometry geometry;
    std::vector<std::pair<unsigned, unsigned>> positions;
    std::string id;
    unsigned dt = 0;
    unsigned df = 0;
    std::pair<unsigned, unsigned> offset{0, 0};

    unsigned n_positions() const { return static_cast<unsigned>(positions.size()); }
    double density() const {
        return static_cast<double>(positions.size()) / geometry.block_length();
    }
    /// Symbol-major stacked resource-element indices of the pilot positions.
    arma::uvec stacked_indices() const;
};

/// Rectangular lattice with spacings (dt, df) and an offset inside the first
/// cell. Throws std::invalid_argument when the lattice misses the PRB grid
/// entirely or the offset lies outside (dt, df).
PilotPattern lattice_pattern(const channel::PrbGeometry& geom, unsigned dt, unsigned df,
                             std::pair<unsigned, unsigned> offset = {0, 0});

/// 0/1 selection matrix S of size N_ppos x L with one-hot rows at the
/// stacked pilot indices; S S^H = I.
arma::mat selection_matrix(const PilotPattern& pattern);

/// Lattice family used by the sweep, covering densities from 1/168 up past
/// 0.12 on the default 14x12 grid.
std::vector<PilotPattern> default_catalog(const channel::PrbGeometry& geom);

/// Catalog serialization for reproducibility: array of
/// {id, dt, df, offset, density} objects.
std::string catalog_to_json(const std::vector<PilotPattern>& catalog);

/// Looks a pattern up by id; throws std::invalid_argument when absent.
const PilotPattern& pattern_by_id(const std::vector<PilotPattern>& catalog,
                                  const std::string& id);

} // namespace csiregion::pilots
