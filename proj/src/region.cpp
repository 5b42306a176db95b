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

#include "csiregion/region.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "csiregion/numerics.hpp"

namespace csiregion::region {

namespace {

constexpr double sentinel_threshold = 1e299;

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t key_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

std::vector<pilots::PilotPattern> sorted_by_density(std::vector<pilots::PilotPattern> list) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.density() < b.density(); });
    for (std::size_t i = 1; i < list.size(); ++i)
        if (list[i].density() == list[i - 1].density())
            throw std::invalid_argument(
                "lookup: pattern densities must be unique per axis (got '" + list[i - 1].id +
                "' and '" + list[i].id + "')");
    return list;
}

} // namespace

std::string to_string(DlMode mode) {
    switch (mode) {
        case DlMode::Auto: return "auto";
        case DlMode::Spatial: return "spatial";
        case DlMode::Tdm: return "tdm";
    }
    return "auto";
}

DlMode dl_mode_from_string(const std::string& name) {
    if (name == "auto")
        return DlMode::Auto;
    if (name == "spatial")
        return DlMode::Spatial;
    if (name == "tdm")
        return DlMode::Tdm;
    throw std::invalid_argument("dl_mode must be auto, spatial or tdm");
}

std::string to_string(feedback::FeedbackMode mode) {
    return mode == feedback::FeedbackMode::Redundant ? "redundant" : "successive";
}

std::string OperatingParams::id() const {
    return ul_pattern + "/" + dl_pattern + "/nb" + fmt(n_b) + "/" + to_string(dl_mode) + "/" +
           to_string(fb_mode);
}

NetRates net_rates(double gross_ul, double gross_dl, const OperatingParams& params,
                   const channel::PrbGeometry& geom, unsigned n_bs, unsigned k) {
    if (gross_ul < 0.0 || gross_dl < 0.0)
        throw std::invalid_argument("net_rates: gross rates must be nonnegative");
    if (params.dl_mode == DlMode::Auto)
        throw std::invalid_argument("net_rates: dl_mode must be concrete");

    const double block = geom.block_length();
    const double ul_raw =
        (gross_ul * block * (1.0 - k * params.rho_ul) - params.n_b * n_bs * k) / block;
    const double dl_overhead = params.dl_mode == DlMode::Spatial
                                   ? (static_cast<double>(n_bs) + k) * params.rho_dl
                                   : params.rho_dl;
    return {std::max(0.0, ul_raw), std::max(0.0, gross_dl * (1.0 - dl_overhead))};
}

std::size_t LookupTable::flat_index(std::size_t i_rho_ul, std::size_t i_rho_dl,
                                    std::size_t i_n_b, std::size_t i_v,
                                    std::size_t i_tau) const {
    return (((i_rho_ul * rho_dl.size() + i_rho_dl) * n_b.size() + i_n_b) * v_kmh.size() + i_v) *
               tau_max_us.size() +
           i_tau;
}

namespace {

std::size_t nearest_index(const std::vector<double>& axis, double q) {
    if (axis.empty())
        throw std::invalid_argument("lookup: empty axis");
    std::size_t best = 0;
    double best_dist = std::abs(axis[0] - q);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        const double d = std::abs(axis[i] - q);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

} // namespace

const feedback::CsiQuality& LookupTable::nearest(double rho_ul_q, double rho_dl_q,
                                                 double n_b_q, double v_kmh_q,
                                                 double tau_us_q) const {
    return values[flat_index(nearest_index(rho_ul, rho_ul_q), nearest_index(rho_dl, rho_dl_q),
                             nearest_index(n_b, n_b_q), nearest_index(v_kmh, v_kmh_q),
                             nearest_index(tau_max_us, tau_us_q))];
}

std::string LookupTable::to_json() const {
    nlohmann::json j;
    j["axes"] = {{"rho_ul", rho_ul},
                 {"rho_dl", rho_dl},
                 {"n_b", n_b},
                 {"v_kmh", v_kmh},
                 {"tau_max_us", tau_max_us}};
    nlohmann::json vals = nlohmann::json::array();
    for (std::size_t a = 0; a < rho_ul.size(); ++a)
        for (std::size_t b = 0; b < rho_dl.size(); ++b)
            for (std::size_t c = 0; c < n_b.size(); ++c)
                for (std::size_t d = 0; d < v_kmh.size(); ++d)
                    for (std::size_t e = 0; e < tau_max_us.size(); ++e) {
                        const feedback::CsiQuality& q = values[flat_index(a, b, c, d, e)];
                        vals.push_back({{"idx", {a, b, c, d, e}},
                                        {"sigma_ul_bs", q.sigma_ul_bs},
                                        {"sigma_dl_ut", q.sigma_dl_ut},
                                        {"sigma_dl_ut_tdm", q.sigma_dl_ut_tdm},
                                        {"sigma_dl_bs", q.sigma_dl_bs}});
                    }
    j["values"] = std::move(vals);
    return j.dump(2);
}

LookupTable LookupTable::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    LookupTable table;
    table.rho_ul = j.at("axes").at("rho_ul").get<std::vector<double>>();
    table.rho_dl = j.at("axes").at("rho_dl").get<std::vector<double>>();
    table.n_b = j.at("axes").at("n_b").get<std::vector<double>>();
    table.v_kmh = j.at("axes").at("v_kmh").get<std::vector<double>>();
    table.tau_max_us = j.at("axes").at("tau_max_us").get<std::vector<double>>();

    const std::size_t total = table.rho_ul.size() * table.rho_dl.size() * table.n_b.size() *
                              table.v_kmh.size() * table.tau_max_us.size();
    table.values.assign(total, {});
    std::vector<bool> filled(total, false);
    for (const auto& entry : j.at("values")) {
        const auto idx = entry.at("idx").get<std::vector<std::size_t>>();
        if (idx.size() != 5)
            throw std::invalid_argument("lookup json: idx must have five entries");
        const std::size_t flat =
            table.flat_index(idx[0], idx[1], idx[2], idx[3], idx[4]);
        feedback::CsiQuality q;
        q.sigma_ul_bs = entry.at("sigma_ul_bs").get<double>();
        q.sigma_dl_ut = entry.at("sigma_dl_ut").get<double>();
        q.sigma_dl_ut_tdm = entry.at("sigma_dl_ut_tdm").get<double>();
        q.sigma_dl_bs = entry.at("sigma_dl_bs").get<double>();
        table.values[flat] = q;
        filled[flat] = true;
    }
    for (bool f : filled)
        if (!f)
            throw std::invalid_argument("lookup json: grid has missing nodes");
    return table;
}

namespace {

channel::ChannelProfile profile_at(const config::SystemConfig& system, double v_kmh,
                                   double tau_us) {
    channel::ChannelProfile p = system.profile;
    p.set_velocity_kmh(v_kmh);
    p.max_delay_spread_s = tau_us * 1e-6;
    return p;
}

double ul_sigma_for(const config::SystemConfig& system,
                    const channel::ChannelProfile& profile,
                    const pilots::PilotPattern& pattern) {
    try {
        if (system.ul_cramer_rao)
            return estimation::cramer_rao_noise(system.budget.sigma_pilot,
                                                pattern.n_positions());
        const auto mse = estimation::estimation_mse(system.geometry, profile, pattern,
                                                    system.budget.sigma_pilot, 0);
        return estimation::noise_ratio(mse, profile.coeff_variance, system.reduction).sigma_sq;
    } catch (const UnusableLink&) {
        return feedback::CsiQuality::unusable_sentinel;
    }
}

struct DlSigmas {
    double ut = 0.0;
    double ut_tdm = 0.0;
    double bs = 0.0;
};

DlSigmas dl_sigmas_for(const config::SystemConfig& system,
                       const channel::ChannelProfile& profile,
                       const pilots::PilotPattern& pattern, double n_b) {
    DlSigmas out;
    estimation::MsePerSymbol mse_csir;
    try {
        mse_csir = estimation::estimation_mse(system.geometry, profile, pattern,
                                              system.budget.sigma_pilot, 0);
        out.ut = estimation::noise_ratio(mse_csir, profile.coeff_variance, system.reduction)
                     .sigma_sq;
        // TDM estimates a single effective coefficient of the same variance
        // with the same pilot sequence, so its quality coincides.
        out.ut_tdm = out.ut;
    } catch (const UnusableLink&) {
        out.ut = out.ut_tdm = out.bs = feedback::CsiQuality::unusable_sentinel;
        return out;
    }

    try {
        feedback::FeedbackConfig fb = system.fb;
        fb.bits_per_coeff = n_b;
        estimation::MsePerSymbol mse_csit;
        if (fb.mode == feedback::FeedbackMode::Redundant) {
            mse_csit = feedback::csit_mse(system.geometry, profile, pattern,
                                          system.budget.sigma_pilot, fb);
        } else {
            const auto steady = feedback::steady_state_equivalent_bits(
                system.geometry, profile, pattern, system.budget.sigma_pilot, fb);
            feedback::FeedbackConfig equivalent = fb;
            equivalent.mode = feedback::FeedbackMode::Redundant;
            equivalent.bits_per_coeff = steady.equivalent_bits;
            mse_csit = feedback::csit_mse(system.geometry, profile, pattern,
                                          system.budget.sigma_pilot, equivalent);
        }
        out.bs = feedback::csit_noise_ratio(mse_csit, mse_csir, profile.coeff_variance);
    } catch (const UnusableLink&) {
        out.bs = feedback::CsiQuality::unusable_sentinel;
    }
    return out;
}

} // namespace

LookupTable build_lookup(const config::SystemConfig& system,
                         const std::vector<pilots::PilotPattern>& ul_patterns,
                         const std::vector<pilots::PilotPattern>& dl_patterns,
                         const std::vector<double>& n_b_grid,
                         const std::vector<double>& v_kmh_grid,
                         const std::vector<double>& tau_us_grid, unsigned threads) {
    system.validate();
    if (ul_patterns.empty() || dl_patterns.empty() || n_b_grid.empty() ||
        v_kmh_grid.empty() || tau_us_grid.empty())
        throw std::invalid_argument("build_lookup: all grids must be nonempty");

    const auto ul_sorted = sorted_by_density(ul_patterns);
    const auto dl_sorted = sorted_by_density(dl_patterns);

    LookupTable table;
    for (const auto& p : ul_sorted)
        table.rho_ul.push_back(p.density());
    for (const auto& p : dl_sorted)
        table.rho_dl.push_back(p.density());
    table.n_b = n_b_grid;
    std::sort(table.n_b.begin(), table.n_b.end());
    table.v_kmh = v_kmh_grid;
    std::sort(table.v_kmh.begin(), table.v_kmh.end());
    table.tau_max_us = tau_us_grid;
    std::sort(table.tau_max_us.begin(), table.tau_max_us.end());

    const std::size_t n_scen = table.v_kmh.size() * table.tau_max_us.size();
    const std::size_t n_ul_tasks = ul_sorted.size() * n_scen;
    const std::size_t n_dl_tasks = dl_sorted.size() * table.n_b.size() * n_scen;

    std::vector<double> ul_sigma(n_ul_tasks);
    std::vector<DlSigmas> dl_sigma(n_dl_tasks);
    parallel_for(n_ul_tasks + n_dl_tasks, threads, [&](std::size_t task) {
        if (task < n_ul_tasks) {
            const std::size_t i_p = task / n_scen;
            const std::size_t i_v = (task % n_scen) / table.tau_max_us.size();
            const std::size_t i_t = task % table.tau_max_us.size();
            const auto profile = profile_at(system, table.v_kmh[i_v], table.tau_max_us[i_t]);
            ul_sigma[task] = ul_sigma_for(system, profile, ul_sorted[i_p]);
        } else {
            const std::size_t t = task - n_ul_tasks;
            const std::size_t i_p = t / (table.n_b.size() * n_scen);
            const std::size_t i_b = (t / n_scen) % table.n_b.size();
            const std::size_t i_v = (t % n_scen) / table.tau_max_us.size();
            const std::size_t i_t = t % table.tau_max_us.size();
            const auto profile = profile_at(system, table.v_kmh[i_v], table.tau_max_us[i_t]);
            dl_sigma[t] = dl_sigmas_for(system, profile, dl_sorted[i_p], table.n_b[i_b]);
        }
    });

    log::info("lookup: " + std::to_string(n_ul_tasks) + " uplink and " +
              std::to_string(n_dl_tasks) + " downlink nodes evaluated");
    table.values.resize(table.rho_ul.size() * table.rho_dl.size() * table.n_b.size() * n_scen);
    for (std::size_t a = 0; a < table.rho_ul.size(); ++a)
        for (std::size_t b = 0; b < table.rho_dl.size(); ++b)
            for (std::size_t c = 0; c < table.n_b.size(); ++c)
                for (std::size_t d = 0; d < table.v_kmh.size(); ++d)
                    for (std::size_t e = 0; e < table.tau_max_us.size(); ++e) {
                        const std::size_t scen = d * table.tau_max_us.size() + e;
                        const DlSigmas& dl =
                            dl_sigma[(b * table.n_b.size() + c) * n_scen + scen];
                        feedback::CsiQuality q;
                        q.sigma_ul_bs = ul_sigma[a * n_scen + scen];
                        q.sigma_dl_ut = dl.ut;
                        q.sigma_dl_ut_tdm = dl.ut_tdm;
                        q.sigma_dl_bs = dl.bs;
                        table.values[table.flat_index(a, b, c, d, e)] = q;
                    }
    return table;
}

namespace {

/// Monte Carlo gross rates against the shared realization set, memoized per
/// distinct sigma tuple so the sweep cost scales with the number of distinct
/// CSI qualities instead of the number of points.
class RateEvaluator {
  public:
    RateEvaluator(const config::SystemConfig& system, std::size_t realizations,
                  std::uint64_t seed)
        : system_(system),
          realizations_(channel::sample_flat_channels(system.n_bs, system.k, realizations,
                                                      seed,
                                                      system.profile.coeff_variance)) {}

    double ul_gross(double sigma_ul) const {
        if (sigma_ul >= sentinel_threshold || realizations_.empty())
            return 0.0;
        double sum = 0.0;
        for (const auto& real : realizations_) {
            const auto eff = capacity::ul_effective_params(
                real.h_ul, system_.profile.coeff_variance, sigma_ul);
            sum += capacity::ul_sum_rate(eff, system_.budget.sigma_ul,
                                         system_.budget.p_max_ul)
                       .rate;
        }
        return sum / static_cast<double>(realizations_.size());
    }

    double dl_spatial_gross(double sigma_ut, double sigma_bs) const {
        if (sigma_ut >= sentinel_threshold || sigma_bs >= sentinel_threshold ||
            realizations_.empty())
            return 0.0;
        if (sigma_bs >= system_.profile.coeff_variance)
            return 0.0; // controllable term clamps to zero
        double sum = 0.0;
        for (const auto& real : realizations_) {
            const auto eff = capacity::dl_effective_params(
                real.h_dl, system_.profile.coeff_variance, sigma_ut, sigma_bs);
            sum += capacity::dl_sum_rate(eff, system_.budget.sigma_dl,
                                         system_.budget.p_tot_dl)
                       .rate;
        }
        return sum / static_cast<double>(realizations_.size());
    }

    double dl_tdm_gross(double sigma_ut_tdm) const {
        if (sigma_ut_tdm >= sentinel_threshold || realizations_.empty())
            return 0.0;
        double sum = 0.0;
        for (const auto& real : realizations_) {
            sum += capacity::tdm_sum_rate(real.h_dl, system_.profile.coeff_variance,
                                          sigma_ut_tdm, system_.budget.sigma_dl,
                                          system_.budget.p_tot_dl);
        }
        return sum / static_cast<double>(realizations_.size());
    }

    std::size_t realization_count() const { return realizations_.size(); }

  private:
    const config::SystemConfig& system_;
    std::vector<channel::ChannelRealization> realizations_;
};

bool quality_usable(const feedback::CsiQuality& q) {
    return q.sigma_ul_bs < sentinel_threshold && q.sigma_dl_ut < sentinel_threshold;
}

} // namespace

RatePoint evaluate_operating_point(const config::SystemConfig& system,
                                   const OperatingParams& params, const LookupTable& lookup,
                                   std::size_t realizations, std::uint64_t seed) {
    system.validate();
    const feedback::CsiQuality q =
        lookup.nearest(params.rho_ul, params.rho_dl, params.n_b,
                       system.profile.velocity_mps * 3.6,
                       system.profile.max_delay_spread_s * 1e6);
    const RateEvaluator eval(system, realizations, seed);

    RatePoint point;
    point.params = params;
    point.realization_count = eval.realization_count();
    point.feasible = quality_usable(q) && q.sigma_dl_bs < sentinel_threshold;

    point.gross_ul = eval.ul_gross(q.sigma_ul_bs);

    const auto finish = [&](DlMode mode, double gross_dl) {
        OperatingParams p = params;
        p.dl_mode = mode;
        const NetRates net = net_rates(point.gross_ul, gross_dl, p, system.geometry,
                                       system.n_bs, system.k);
        RatePoint out = point;
        out.params = p;
        out.gross_dl = gross_dl;
        out.net_ul = net.ul;
        out.net_dl = net.dl;
        const double block = system.geometry.block_length();
        const double ul_raw = (point.gross_ul * block * (1.0 - system.k * p.rho_ul) -
                               p.n_b * system.n_bs * system.k) /
                              block;
        if (ul_raw < 0.0)
            out.feasible = false;
        return out;
    };

    if (params.dl_mode == DlMode::Spatial)
        return finish(DlMode::Spatial, eval.dl_spatial_gross(q.sigma_dl_ut, q.sigma_dl_bs));
    if (params.dl_mode == DlMode::Tdm)
        return finish(DlMode::Tdm, eval.dl_tdm_gross(q.sigma_dl_ut_tdm));

    // Auto: evaluate both routes and report the better net downlink rate.
    const RatePoint spatial =
        finish(DlMode::Spatial, eval.dl_spatial_gross(q.sigma_dl_ut, q.sigma_dl_bs));
    const RatePoint tdm = finish(DlMode::Tdm, eval.dl_tdm_gross(q.sigma_dl_ut_tdm));
    return tdm.net_dl > spatial.net_dl ? tdm : spatial;
}

std::vector<RatePoint> sweep(const config::SystemConfig& system,
                             const std::vector<pilots::PilotPattern>& ul_patterns,
                             const std::vector<pilots::PilotPattern>& dl_patterns,
                             const std::vector<double>& n_b_grid, const LookupTable& lookup,
                             DlMode dl_mode, std::size_t realizations, std::uint64_t seed,
                             unsigned threads) {
    system.validate();
    if (ul_patterns.empty() || dl_patterns.empty() || n_b_grid.empty())
        throw std::invalid_argument("sweep: all grids must be nonempty");

    const auto ul_sorted = sorted_by_density(ul_patterns);
    const auto dl_sorted = sorted_by_density(dl_patterns);
    std::vector<double> n_b_sorted = n_b_grid;
    std::sort(n_b_sorted.begin(), n_b_sorted.end());

    std::vector<DlMode> modes;
    if (dl_mode == DlMode::Auto)
        modes = {DlMode::Spatial, DlMode::Tdm};
    else
        modes = {dl_mode};

    const double v_kmh = system.profile.velocity_mps * 3.6;
    const double tau_us = system.profile.max_delay_spread_s * 1e6;

    struct Combo {
        OperatingParams params;
        feedback::CsiQuality quality;
    };
    std::vector<Combo> combos;
    combos.reserve(ul_sorted.size() * dl_sorted.size() * n_b_sorted.size() * modes.size());
    for (const auto& ul : ul_sorted)
        for (const auto& dl : dl_sorted)
            for (double n_b : n_b_sorted)
                for (DlMode mode : modes) {
                    Combo c;
                    c.params.ul_pattern = ul.id;
                    c.params.dl_pattern = dl.id;
                    c.params.rho_ul = ul.density();
                    c.params.rho_dl = dl.density();
                    c.params.n_b = n_b;
                    c.params.dl_mode = mode;
                    c.params.fb_mode = system.fb.mode;
                    c.quality = lookup.nearest(c.params.rho_ul, c.params.rho_dl, n_b, v_kmh,
                                               tau_us);
                    combos.push_back(std::move(c));
                }

    // Distinct sigma tuples, discovered in deterministic combo order.
    std::map<std::uint64_t, std::size_t> ul_keys;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> dl_keys;
    std::map<std::uint64_t, std::size_t> tdm_keys;
    std::vector<double> ul_args;
    std::vector<std::pair<double, double>> dl_args;
    std::vector<double> tdm_args;
    for (const Combo& c : combos) {
        if (ul_keys.emplace(key_bits(c.quality.sigma_ul_bs), ul_args.size()).second)
            ul_args.push_back(c.quality.sigma_ul_bs);
        if (c.params.dl_mode == DlMode::Spatial) {
            const auto key = std::make_pair(key_bits(c.quality.sigma_dl_ut),
                                            key_bits(c.quality.sigma_dl_bs));
            if (dl_keys.emplace(key, dl_args.size()).second)
                dl_args.emplace_back(c.quality.sigma_dl_ut, c.quality.sigma_dl_bs);
        } else {
            if (tdm_keys.emplace(key_bits(c.quality.sigma_dl_ut_tdm), tdm_args.size()).second)
                tdm_args.push_back(c.quality.sigma_dl_ut_tdm);
        }
    }

    log::info("sweep: " + std::to_string(combos.size()) + " points, " +
              std::to_string(ul_args.size() + dl_args.size() + tdm_args.size()) +
              " distinct CSI qualities, " + std::to_string(realizations) + " realizations");
    const RateEvaluator eval(system, realizations, seed);
    std::vector<double> ul_rates(ul_args.size());
    std::vector<double> dl_rates(dl_args.size());
    std::vector<double> tdm_rates(tdm_args.size());
    const std::size_t total_tasks = ul_args.size() + dl_args.size() + tdm_args.size();
    parallel_for(total_tasks, threads, [&](std::size_t task) {
        if (task < ul_args.size()) {
            ul_rates[task] = eval.ul_gross(ul_args[task]);
        } else if (task < ul_args.size() + dl_args.size()) {
            const std::size_t i = task - ul_args.size();
            dl_rates[i] = eval.dl_spatial_gross(dl_args[i].first, dl_args[i].second);
        } else {
            const std::size_t i = task - ul_args.size() - dl_args.size();
            tdm_rates[i] = eval.dl_tdm_gross(tdm_args[i]);
        }
    });

    std::vector<RatePoint> points;
    points.reserve(combos.size());
    const double block = system.geometry.block_length();
    for (const Combo& c : combos) {
        RatePoint p;
        p.params = c.params;
        p.realization_count = eval.realization_count();
        p.gross_ul = ul_rates[ul_keys.at(key_bits(c.quality.sigma_ul_bs))];
        if (c.params.dl_mode == DlMode::Spatial) {
            p.gross_dl = dl_rates[dl_keys.at(std::make_pair(
                key_bits(c.quality.sigma_dl_ut), key_bits(c.quality.sigma_dl_bs)))];
        } else {
            p.gross_dl = tdm_rates[tdm_keys.at(key_bits(c.quality.sigma_dl_ut_tdm))];
        }
        const NetRates net =
            net_rates(p.gross_ul, p.gross_dl, c.params, system.geometry, system.n_bs, system.k);
        p.net_ul = net.ul;
        p.net_dl = net.dl;
        const double ul_raw = (p.gross_ul * block * (1.0 - system.k * c.params.rho_ul) -
                               c.params.n_b * system.n_bs * system.k) /
                              block;
        p.feasible = quality_usable(c.quality) && ul_raw >= 0.0;
        points.push_back(std::move(p));
    }

    for (std::size_t idx : pareto_frontier(points))
        points[idx].pareto = true;
    for (const HullVertex& v : convex_region(points))
        if (v.point_index)
            points[*v.point_index].hull = true;
    return points;
}

std::vector<std::size_t> pareto_frontier(const std::vector<RatePoint>& points) {
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::vector<std::string> ids(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        ids[i] = points[i].params.id();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].net_ul != points[b].net_ul)
            return points[a].net_ul > points[b].net_ul;
        if (points[a].net_dl != points[b].net_dl)
            return points[a].net_dl > points[b].net_dl;
        return ids[a] < ids[b];
    });

    std::vector<std::size_t> frontier;
    double best_dl = -1.0;
    for (std::size_t idx : order) {
        if (points[idx].net_dl > best_dl) {
            frontier.push_back(idx);
            best_dl = points[idx].net_dl;
        }
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

std::vector<HullVertex> convex_region(const std::vector<RatePoint>& points) {
    if (points.empty())
        throw std::invalid_argument("convex_region: needs at least one point");

    double max_ul = 0.0, max_dl = 0.0;
    for (const RatePoint& p : points) {
        max_ul = std::max(max_ul, p.net_ul);
        max_dl = std::max(max_dl, p.net_dl);
    }

    std::vector<HullVertex> candidates;
    for (std::size_t idx : pareto_frontier(points))
        candidates.push_back({points[idx].net_ul, points[idx].net_dl, idx});
    candidates.push_back({max_ul, 0.0, std::nullopt});
    candidates.push_back({0.0, max_dl, std::nullopt});

    std::sort(candidates.begin(), candidates.end(), [](const HullVertex& a, const HullVertex& b) {
        if (a.net_ul != b.net_ul)
            return a.net_ul < b.net_ul;
        if (a.net_dl != b.net_dl)
            return a.net_dl > b.net_dl;
        return a.point_index.has_value() && !b.point_index.has_value();
    });
    // Drop duplicate coordinates, preferring real points over anchors.
    std::vector<HullVertex> unique;
    for (const HullVertex& v : candidates)
        if (unique.empty() || unique.back().net_ul != v.net_ul ||
            unique.back().net_dl != v.net_dl)
            unique.push_back(v);

    // Upper hull, left to right; collinear interior vertices are popped.
    const auto cross = [](const HullVertex& o, const HullVertex& a, const HullVertex& b) {
        return (a.net_ul - o.net_ul) * (b.net_dl - o.net_dl) -
               (a.net_dl - o.net_dl) * (b.net_ul - o.net_ul);
    };
    std::vector<HullVertex> hull;
    for (const HullVertex& v : unique) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), v) >= 0.0)
            hull.pop_back();
        hull.push_back(v);
    }
    return hull;
}

std::size_t weighted_optimum(const std::vector<RatePoint>& points, double weight) {
    if (points.empty())
        throw std::invalid_argument("weighted_optimum: needs at least one point");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("weighted_optimum: weight must lie in [0, 1]");

    const auto objective = [&](const RatePoint& p) {
        return weight * p.net_ul + (1.0 - weight) * p.net_dl;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double oi = objective(points[i]);
        const double ob = objective(points[best]);
        if (oi > ob) {
            best = i;
            continue;
        }
        if (oi < ob)
            continue;
        // Objective ties: prefer the point that also maximizes the other
        // component (keeps the w = 0 and w = 1 corners informative), then
        // fewer feedback bits, then lower downlink density, then id.
        const double si = points[i].net_ul + points[i].net_dl;
        const double sb = points[best].net_ul + points[best].net_dl;
        if (si != sb) {
            if (si > sb)
                best = i;
            continue;
        }
        if (points[i].params.n_b != points[best].params.n_b) {
            if (points[i].params.n_b < points[best].params.n_b)
                best = i;
            continue;
        }
        if (points[i].params.rho_dl != points[best].params.rho_dl) {
            if (points[i].params.rho_dl < points[best].params.rho_dl)
                best = i;
            continue;
        }
        if (points[i].params.id() < points[best].params.id())
            best = i;
    }
    return best;
}

std::string to_csv(const std::vector<RatePoint>& points) {
    std::string out =
        "ul_pattern,dl_pattern,rho_ul,rho_dl,n_b,dl_mode,feedback_mode,"
        "gross_ul,gross_dl,net_ul,net_dl,pareto,hull\n";
    for (const RatePoint& p : points) {
        out += p.params.ul_pattern + ',' + p.params.dl_pattern + ',' + fmt(p.params.rho_ul) +
               ',' + fmt(p.params.rho_dl) + ',' + fmt(p.params.n_b) + ',' +
               to_string(p.params.dl_mode) + ',' + to_string(p.params.fb_mode) + ',' +
               fmt(p.gross_ul) + ',' + fmt(p.gross_dl) + ',' + fmt(p.net_ul) + ',' +
               fmt(p.net_dl) + ',' + (p.pareto ? '1' : '0') + ',' + (p.hull ? '1' : '0') + '\n';
    }
    return out;
}

} // namespace csiregion::region
