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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csiregion/capacity.hpp"
#include "csiregion/estimation.hpp"
#include "csiregion/feedback.hpp"

namespace csiregion::config {

/// Scenario description shared by all subcommands. Defaults reproduce the
/// reference scenario: N_BS = K = 4, f_c = 2.6 GHz, unit channel power,
/// all noise variances 0.1, per-terminal UL power 1, BS sum power 1,
/// tau_max = 1 us, N_rank = 2, N_d = 5.
struct SystemConfig {
    channel::PrbGeometry geometry;
    channel::ChannelProfile profile;
    capacity::LinkBudget budget;
    unsigned n_bs = 4;
    unsigned k = 4;
    feedback::FeedbackConfig fb;
    estimation::Reduction reduction = estimation::Reduction::Max;
    bool ul_cramer_rao = false;

    SystemConfig() {
        profile.set_velocity_kmh(10.0);
        profile.max_delay_spread_s = 1e-6;
    }
    void validate() const;
};

/// Lattice spec for a custom catalog entry.
struct PatternSpec {
    unsigned dt = 1;
    unsigned df = 1;
    unsigned offset_t = 0;
    unsigned offset_f = 0;
};

struct SweepConfig {
    std::vector<PatternSpec> catalog;          // empty: built-in lattice family
    std::vector<std::string> ul_patterns;      // empty: whole catalog
    std::vector<std::string> dl_patterns;      // empty: whole catalog
    std::vector<double> n_b_grid = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
    std::size_t realizations = 200;
};

struct LookupGrids {
    std::vector<double> v_kmh;   // empty: the scenario velocity
    std::vector<double> tau_us;  // empty: the scenario delay spread
};

struct PointConfig {
    std::string ul_pattern = "dt14df4";
    std::string dl_pattern = "dt14df4";
    double n_b = 12.0;
    std::string dl_mode = "auto";
};

struct RunConfig {
    SystemConfig system;
    SweepConfig sweep;
    LookupGrids lookup;
    PointConfig point;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0: hardware concurrency
};

/// Minimal TOML reader covering the subset this tool consumes: comments,
/// [tables], bare keys, strings, booleans, integers, floats and (nested)
/// arrays. Keys come back dotted ("system.n_bs").
struct TomlValue {
    enum class Kind { Boolean, Integer, Float, String, Array };
    Kind kind = Kind::Integer;
    bool boolean = false;
    long long integer = 0;
    double real = 0.0;
    std::string text;
    std::vector<TomlValue> array;

    double as_number() const;
};
std::map<std::string, TomlValue> parse_toml(const std::string& text);

/// Parses a config file and overlays it on the defaults. Unknown keys are
/// rejected so typos surface as exit code 2 instead of silent defaults.
RunConfig load_config_file(const std::string& path);
RunConfig apply_toml_text(const std::string& text, RunConfig base = {});

} // namespace csiregion::config
