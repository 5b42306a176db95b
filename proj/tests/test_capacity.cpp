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

#include <catch2/catch_amalgamated.hpp>

#include "csiregion/capacity.hpp"
#include "csiregion/numerics.hpp"
#include "oracles.hpp"

using namespace csiregion;
using namespace csiregion::capacity;

namespace {

arma::cx_mat random_channel(unsigned n, unsigned k, std::uint64_t seed) {
    numerics::NormalStream stream(seed);
    arma::cx_mat h(n, k);
    for (auto& v : h)
        v = stream.next_cnormal();
    return h;
}

} // namespace

TEST_CASE("uplink effective parameters") {
    const arma::cx_mat h = random_channel(3, 2, 1);
    SECTION("perfect CSI leaves the channel untouched") {
        const auto eff = ul_effective_params(h, 1.0, 0.0);
        CHECK(arma::abs(eff.h_eff - h).max() == 0.0);
        CHECK(arma::abs(eff.e_bar).max() == 0.0);
    }
    SECTION("reference numbers at sigma^2 = 0.1") {
        const auto eff = ul_effective_params(h, 1.0, 0.1);
        CHECK(std::abs(eff.h_eff(0, 0) / h(0, 0)) ==
              Catch::Approx(1.0 / std::sqrt(1.1)).margin(1e-9));
        CHECK(std::abs(eff.h_eff(0, 0) / h(0, 0)) == Catch::Approx(0.95346).margin(1e-5));
        CHECK(eff.e_bar(0, 0) == Catch::Approx(0.30151).margin(1e-5));
    }
    SECTION("power conservation identity") {
        for (double s : {0.01, 0.1, 0.5, 2.0}) {
            const auto eff = ul_effective_params(h, 1.0, s);
            const double scale_sq = 1.0 / (1.0 + s);
            CHECK(scale_sq * 1.0 + eff.e_bar(0, 0) * eff.e_bar(0, 0) ==
                  Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("uplink sum rate") {
    SECTION("single-user perfect-CSI anchor log2(11)") {
        arma::cx_mat h(1, 1);
        h(0, 0) = 1.0;
        const auto eff = ul_effective_params(h, 1.0, 0.0);
        const auto r = ul_sum_rate(eff, 0.1, 1.0);
        CHECK(r.rate == Catch::Approx(std::log2(11.0)).margin(1e-9));
        CHECK(r.powers(0) == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("perfect CSI keeps full power") {
        const auto eff = ul_effective_params(random_channel(4, 4, 3), 1.0, 0.0);
        const auto r = ul_sum_rate(eff, 0.1, 1.0);
        CHECK(arma::abs(r.powers - 1.0).max() < 1e-8);
    }
    SECTION("grid oracle at K = 2") {
        for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
            const auto eff = ul_effective_params(random_channel(2, 2, seed), 1.0, 0.15);
            const auto r = ul_sum_rate(eff, 0.1, 1.0);
            const double oracle = oracles::ul_grid_oracle(eff, 0.1, 1.0);
            CHECK(r.rate == Catch::Approx(oracle).margin(1e-4));
        }
    }
    SECTION("a terminal that mostly adds estimation noise gets throttled") {
        // N = 1, strong CSI noise: terminal 2's signal is weak, its power
        // mostly raises the common estimation-noise floor.
        arma::cx_mat h(1, 2);
        h(0, 0) = 2.0;
        h(0, 1) = 0.05;
        const auto eff = ul_effective_params(h, 1.0, 2.0);
        const auto r = ul_sum_rate(eff, 0.1, 1.0);
        CHECK(r.powers(1) < 0.01);
        CHECK(r.powers(0) == Catch::Approx(1.0).margin(1e-6));
        arma::vec full(2, arma::fill::ones);
        CHECK(r.rate >= oracles::ul_objective_at(eff, 0.1, full) - 1e-12);
    }
    SECTION("imperfect CSI never beats perfect CSI") {
        for (std::uint64_t seed : {21, 22, 23}) {
            const arma::cx_mat h = random_channel(3, 3, seed);
            const double perfect = ul_sum_rate(ul_effective_params(h, 1.0, 0.0), 0.1, 1.0).rate;
            const double rough = ul_sum_rate(ul_effective_params(h, 1.0, 0.3), 0.1, 1.0).rate;
            CHECK(rough <= perfect + 1e-9);
            CHECK(rough >= 0.0);
        }
    }
}

TEST_CASE("downlink effective parameters") {
    const arma::cx_mat h = random_channel(3, 2, 7);
    SECTION("perfect CSI is the identity transform") {
        const auto eff = dl_effective_params(h, 1.0, 0.0, 0.0);
        CHECK(arma::abs(eff.h_eff - h).max() == 0.0);
        CHECK(arma::abs(eff.e_ut).max() == 0.0);
        CHECK(arma::abs(eff.e_bs).max() == 0.0);
    }
    SECTION("reference numbers at 0.1/0.1") {
        const auto eff = dl_effective_params(h, 1.0, 0.1, 0.1);
        CHECK(std::abs(eff.h_eff(0, 0) / h(0, 0)) ==
              Catch::Approx(std::sqrt(0.9 / 1.1)).margin(1e-9));
        CHECK(std::abs(eff.h_eff(0, 0) / h(0, 0)) == Catch::Approx(0.90453).margin(1e-5));
        CHECK(eff.e_ut(0) == Catch::Approx(0.30151).margin(1e-5));
        CHECK(eff.e_bs(0) == Catch::Approx(0.30151).margin(1e-5));
    }
    SECTION("overwhelming transmitter error zeroes the controllable term") {
        const auto eff = dl_effective_params(h, 1.0, 0.1, 1.5);
        CHECK(arma::abs(eff.h_eff).max() == 0.0);
    }
}

TEST_CASE("downlink sum rate") {
    SECTION("single-user duality sanity") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const arma::cx_mat h = random_channel(4, 1, seed);
            const auto eff = dl_effective_params(h, 1.0, 0.0, 0.0);
            const auto r = dl_sum_rate(eff, 0.1, 1.0);
            const double closed = std::log2(1.0 + arma::accu(arma::square(arma::abs(h))) / 0.1);
            CHECK(r.rate == Catch::Approx(closed).margin(1e-6));
        }
    }
    SECTION("zero effective channel, zero rate") {
        const auto eff = dl_effective_params(random_channel(2, 2, 5), 1.0, 0.2, 2.0);
        CHECK(dl_sum_rate(eff, 0.1, 1.0).rate == 0.0);
    }
    SECTION("grid oracle at K = 2") {
        for (std::uint64_t seed : {31, 32, 33, 34, 35}) {
            const auto eff =
                dl_effective_params(random_channel(2, 2, seed), 1.0, 0.1, 0.15);
            const auto r = dl_sum_rate(eff, 0.1, 1.0);
            const double oracle = oracles::dl_grid_oracle(eff, 0.1, 1.0);
            CHECK(r.rate == Catch::Approx(oracle).margin(1e-4));
        }
    }
    SECTION("permutation invariance") {
        const arma::cx_mat h = random_channel(3, 3, 41);
        const auto eff = dl_effective_params(h, 1.0, 0.1, 0.2);
        const double base = dl_sum_rate(eff, 0.1, 1.0).rate;
        arma::cx_mat perm = h.cols(arma::uvec{2, 0, 1});
        const auto eff_p = dl_effective_params(perm, 1.0, 0.1, 0.2);
        CHECK(dl_sum_rate(eff_p, 0.1, 1.0).rate == Catch::Approx(base).margin(1e-6));
    }
    SECTION("better transmitter CSI never hurts") {
        const arma::cx_mat h = random_channel(4, 4, 55);
        double prev = -1.0;
        for (double s_bs : {0.8, 0.4, 0.2, 0.05, 0.0}) {
            const auto eff = dl_effective_params(h, 1.0, 0.1, s_bs);
            const double r = dl_sum_rate(eff, 0.1, 1.0).rate;
            CHECK(r >= prev - 1e-6);
            prev = r;
        }
    }
}

TEST_CASE("TDM fallback") {
    SECTION("single user single antenna with perfect estimation") {
        arma::cx_mat h(1, 1);
        h(0, 0) = {0.6, -0.8};
        const double rate = tdm_sum_rate(h, 1.0, 0.0, 0.1, 1.0);
        CHECK(rate == Catch::Approx(std::log2(1.0 + std::norm(h(0, 0)) / 0.1)).margin(1e-12));
    }
    SECTION("estimation noise kills the rate") {
        const arma::cx_mat h = random_channel(4, 4, 61);
        CHECK(tdm_sum_rate(h, 1.0, 1e12, 0.1, 1.0) < 1e-9);
    }
    SECTION("per-terminal averaging structure") {
        const arma::cx_mat h1 = random_channel(4, 1, 62);
        arma::cx_mat h2(4, 2);
        h2.col(0) = h1.col(0);
        h2.col(1) = h1.col(0);
        const double r1 = tdm_sum_rate(h1, 1.0, 0.05, 0.1, 1.0);
        const double r2 = tdm_sum_rate(h2, 1.0, 0.05, 0.1, 1.0);
        CHECK(r2 == Catch::Approx(r1).margin(1e-12));
    }
    SECTION("effective scalars stay in range") {
        const arma::cx_mat h = random_channel(4, 3, 63);
        const auto eff = tdm_effective_params(h, 1.0, 0.3, 1.0);
        CHECK(eff.noise.max() <= 1.0);
        CHECK(eff.noise.min() >= 0.0);
    }
}
