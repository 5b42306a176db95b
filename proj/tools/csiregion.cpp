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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csiregion/region.hpp"

namespace {

using namespace csiregion;

struct CliOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::string> out_path;
    std::string format = "csv";
    std::optional<double> velocity_kmh;
    std::vector<double> weights;
    std::optional<std::string> feedback_mode;
    std::optional<std::string> dl_mode;
    std::optional<unsigned> threads;
    std::optional<std::string> lookup_path;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "TOML configuration file");
    cmd->add_option("--seed", opt.seed, "Random seed (default 0)");
    cmd->add_option("--samples", opt.samples, "Monte Carlo realizations (default 200)");
    cmd->add_option("--out", opt.out_path, "Output path (default stdout)");
    cmd->add_option("--format", opt.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--velocity-kmh", opt.velocity_kmh, "Terminal velocity in km/h");
    cmd->add_option("--feedback", opt.feedback_mode, "Feedback mode")
        ->check(CLI::IsMember({"redundant", "successive"}));
    cmd->add_option("--dl-mode", opt.dl_mode, "Downlink mode")
        ->check(CLI::IsMember({"auto", "spatial", "tdm"}));
    cmd->add_option("--threads", opt.threads, "Worker thread cap (0 = hardware)");
}

config::RunConfig make_config(const CliOptions& opt) {
    config::RunConfig cfg;
    if (opt.config_path)
        cfg = config::load_config_file(*opt.config_path);
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.samples)
        cfg.sweep.realizations = *opt.samples;
    if (opt.velocity_kmh)
        cfg.system.profile.set_velocity_kmh(*opt.velocity_kmh);
    if (opt.feedback_mode)
        cfg.system.fb.mode = *opt.feedback_mode == "redundant"
                                 ? feedback::FeedbackMode::Redundant
                                 : feedback::FeedbackMode::Successive;
    if (opt.threads)
        cfg.threads = *opt.threads;
    if (opt.dl_mode)
        cfg.point.dl_mode = *opt.dl_mode;
    cfg.system.validate();
    return cfg;
}

struct Catalogs {
    std::vector<pilots::PilotPattern> all;
    std::vector<pilots::PilotPattern> ul;
    std::vector<pilots::PilotPattern> dl;
};

Catalogs make_catalogs(const config::RunConfig& cfg) {
    Catalogs cats;
    if (cfg.sweep.catalog.empty()) {
        cats.all = pilots::default_catalog(cfg.system.geometry);
    } else {
        for (const config::PatternSpec& spec : cfg.sweep.catalog)
            cats.all.push_back(pilots::lattice_pattern(cfg.system.geometry, spec.dt, spec.df,
                                                       {spec.offset_t, spec.offset_f}));
    }
    const auto select = [&](const std::vector<std::string>& ids) {
        if (ids.empty())
            return cats.all;
        std::vector<pilots::PilotPattern> out;
        for (const std::string& id : ids)
            out.push_back(pilots::pattern_by_id(cats.all, id));
        return out;
    };
    cats.ul = select(cfg.sweep.ul_patterns);
    cats.dl = select(cfg.sweep.dl_patterns);
    return cats;
}

void write_output(const CliOptions& opt, const std::string& text) {
    if (opt.out_path) {
        std::ofstream out(*opt.out_path, std::ios::binary);
        if (!out)
            throw std::invalid_argument("cannot open output path '" + *opt.out_path + "'");
        out << text;
    } else {
        std::cout << text;
    }
}

nlohmann::json point_to_json(const region::RatePoint& p) {
    return {{"ul_pattern", p.params.ul_pattern},
            {"dl_pattern", p.params.dl_pattern},
            {"rho_ul", p.params.rho_ul},
            {"rho_dl", p.params.rho_dl},
            {"n_b", p.params.n_b},
            {"dl_mode", region::to_string(p.params.dl_mode)},
            {"feedback_mode", region::to_string(p.params.fb_mode)},
            {"gross_ul", p.gross_ul},
            {"gross_dl", p.gross_dl},
            {"net_ul", p.net_ul},
            {"net_dl", p.net_dl},
            {"pareto", p.pareto},
            {"hull", p.hull},
            {"feasible", p.feasible}};
}

region::LookupTable lookup_for_run(const config::RunConfig& cfg, const Catalogs& cats,
                                   const std::optional<std::string>& lookup_path) {
    if (lookup_path) {
        std::ifstream in(*lookup_path, std::ios::binary);
        if (!in)
            throw std::invalid_argument("cannot open lookup table '" + *lookup_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return region::LookupTable::from_json(buf.str());
    }
    const std::vector<double> v = {cfg.system.profile.velocity_mps * 3.6};
    const std::vector<double> tau = {cfg.system.profile.max_delay_spread_s * 1e6};
    return region::build_lookup(cfg.system, cats.ul, cats.dl, cfg.sweep.n_b_grid, v, tau,
                                cfg.threads);
}

int run_lookup(const CliOptions& opt) {
    const config::RunConfig cfg = make_config(opt);
    const Catalogs cats = make_catalogs(cfg);
    std::vector<double> v = cfg.lookup.v_kmh;
    if (v.empty())
        v = {cfg.system.profile.velocity_mps * 3.6};
    std::vector<double> tau = cfg.lookup.tau_us;
    if (tau.empty())
        tau = {cfg.system.profile.max_delay_spread_s * 1e6};
    const region::LookupTable table = region::build_lookup(
        cfg.system, cats.ul, cats.dl, cfg.sweep.n_b_grid, v, tau, cfg.threads);
    write_output(opt, table.to_json() + "\n");
    return 0;
}

int run_rates(const CliOptions& opt) {
    const config::RunConfig cfg = make_config(opt);
    const Catalogs cats = make_catalogs(cfg);

    const pilots::PilotPattern& ul = pilots::pattern_by_id(cats.all, cfg.point.ul_pattern);
    const pilots::PilotPattern& dl = pilots::pattern_by_id(cats.all, cfg.point.dl_pattern);
    region::OperatingParams params;
    params.ul_pattern = ul.id;
    params.dl_pattern = dl.id;
    params.rho_ul = ul.density();
    params.rho_dl = dl.density();
    params.n_b = cfg.point.n_b;
    params.dl_mode = region::dl_mode_from_string(cfg.point.dl_mode);
    params.fb_mode = cfg.system.fb.mode;

    const region::LookupTable table = region::build_lookup(
        cfg.system, {ul}, {dl}, {params.n_b},
        {cfg.system.profile.velocity_mps * 3.6},
        {cfg.system.profile.max_delay_spread_s * 1e6}, cfg.threads);
    const region::RatePoint point = region::evaluate_operating_point(
        cfg.system, params, table, cfg.sweep.realizations, cfg.seed);

    if (opt.format == "json") {
        write_output(opt, point_to_json(point).dump(2) + "\n");
    } else {
        write_output(opt, region::to_csv({point}));
    }
    return 0;
}

int run_region(const CliOptions& opt) {
    const config::RunConfig cfg = make_config(opt);
    const Catalogs cats = make_catalogs(cfg);
    const region::LookupTable table = lookup_for_run(cfg, cats, opt.lookup_path);

    const region::DlMode mode =
        region::dl_mode_from_string(opt.dl_mode.value_or("auto"));
    const std::vector<region::RatePoint> points =
        region::sweep(cfg.system, cats.ul, cats.dl, cfg.sweep.n_b_grid, table, mode,
                      cfg.sweep.realizations, cfg.seed, cfg.threads);

    if (opt.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : points)
            arr.push_back(point_to_json(p));
        write_output(opt, arr.dump(2) + "\n");
    } else {
        write_output(opt, region::to_csv(points));
    }
    return 0;
}

int run_optimize(const CliOptions& opt) {
    const config::RunConfig cfg = make_config(opt);
    const Catalogs cats = make_catalogs(cfg);
    const region::LookupTable table = lookup_for_run(cfg, cats, opt.lookup_path);

    const region::DlMode mode =
        region::dl_mode_from_string(opt.dl_mode.value_or("auto"));
    const std::vector<region::RatePoint> points =
        region::sweep(cfg.system, cats.ul, cats.dl, cfg.sweep.n_b_grid, table, mode,
                      cfg.sweep.realizations, cfg.seed, cfg.threads);

    std::vector<double> weights = opt.weights;
    if (weights.empty())
        weights = {0.0, 0.25, 0.5, 0.75, 1.0};

    if (opt.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (double w : weights) {
            nlohmann::json row = point_to_json(points[region::weighted_optimum(points, w)]);
            row["weight"] = w;
            arr.push_back(row);
        }
        write_output(opt, arr.dump(2) + "\n");
    } else {
        std::string csv = "weight," + region::to_csv({});
        for (double w : weights) {
            const region::RatePoint& p = points[region::weighted_optimum(points, w)];
            std::string row = region::to_csv({p});
            row.erase(0, row.find('\n') + 1); // strip the header
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", w);
            csv += std::string(buf) + ',' + row;
        }
        write_output(opt, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint uplink/downlink rate regions under imperfect CSI"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* lookup = app.add_subcommand("lookup", "Build and write the CSI-quality lookup table");
    CLI::App* rates = app.add_subcommand("rates", "Evaluate a single operating point");
    CLI::App* reg = app.add_subcommand("region", "Sweep parameters and emit the rate region");
    CLI::App* optimize = app.add_subcommand("optimize", "Weighted UL/DL optimum per weight");
    for (CLI::App* cmd : {lookup, rates, reg, optimize})
        add_common_flags(cmd, opt);
    reg->add_option("--lookup", opt.lookup_path, "Reuse a previously built lookup table");
    optimize->add_option("--lookup", opt.lookup_path, "Reuse a previously built lookup table");
    optimize->add_option("--weight", opt.weights, "UL weight in [0,1], repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (lookup->parsed())
            return run_lookup(opt);
        if (rates->parsed())
            return run_rates(opt);
        if (reg->parsed())
            return run_region(opt);
        if (optimize->parsed())
            return run_optimize(opt);
        return 2;
    } catch (const csiregion::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
