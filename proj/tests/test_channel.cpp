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

#include "csiregion/channel.hpp"
#include "csiregion/numerics.hpp"

using namespace csiregion;
using namespace csiregion::channel;

namespace {

ChannelProfile profile_kmh(double kmh, double tau_us, double fc = 2.6e9) {
    ChannelProfile p;
    p.carrier_freq_hz = fc;
    p.set_velocity_kmh(kmh);
    p.max_delay_spread_s = tau_us * 1e-6;
    return p;
}

} // namespace

TEST_CASE("temporal correlation anchors") {
    const PrbGeometry geom;
    SECTION("static channel gives an all-ones matrix") {
        const arma::mat pi_t = temporal_correlation(geom, profile_kmh(0.0, 1.0), 3);
        CHECK(arma::abs(pi_t - 1.0).max() == 0.0);
    }
    SECTION("zero lag has a unit diagonal") {
        const arma::mat pi_t = temporal_correlation(geom, profile_kmh(120.0, 1.0), 0);
        CHECK(arma::abs(pi_t.diag() - 1.0).max() == 0.0);
    }
    SECTION("100 km/h at 2.6 GHz") {
        const ChannelProfile p = profile_kmh(100.0, 1.0);
        CHECK(p.doppler_hz() == Catch::Approx(240.76).margin(0.2));
        const arma::mat pi_t = temporal_correlation(geom, p, 0);
        CHECK(pi_t(0, 1) == Catch::Approx(0.99708).margin(1e-5));
    }
    SECTION("negative lag is rejected") {
        CHECK_THROWS_AS(temporal_correlation(geom, profile_kmh(1.0, 1.0), -1),
                        std::invalid_argument);
    }
    SECTION("entries stay within [-1, 1]") {
        const arma::mat pi_t = temporal_correlation(geom, profile_kmh(500.0, 1.0), 7);
        CHECK(arma::abs(pi_t).max() <= 1.0 + 1e-12);
    }
}

TEST_CASE("spectral correlation anchors") {
    const PrbGeometry geom;
    SECTION("zero delay spread gives all-ones") {
        const arma::mat pi_f = spectral_correlation(geom, profile_kmh(10.0, 0.0));
        CHECK(arma::abs(pi_f - 1.0).max() == 0.0);
    }
    SECTION("1 us at 15 kHz spacing") {
        const arma::mat pi_f = spectral_correlation(geom, profile_kmh(10.0, 1.0));
        CHECK(pi_f(0, 1) == Catch::Approx(0.99852).margin(1e-5));
        CHECK(arma::abs(pi_f).max() <= 1.0 + 1e-12);
    }
    SECTION("Toeplitz structure") {
        const arma::mat pi_f = spectral_correlation(geom, profile_kmh(10.0, 2.5));
        for (unsigned i = 0; i + 1 < geom.n_subcarriers; ++i)
            for (unsigned j = 0; j + 1 < geom.n_subcarriers; ++j)
                CHECK(pi_f(i, j) == pi_f(i + 1, j + 1));
    }
}

TEST_CASE("prb covariance structure") {
    const PrbGeometry geom;
    SECTION("degenerate profile gives the rank-one all-ones covariance") {
        const arma::cx_mat phi = prb_covariance(geom, profile_kmh(0.0, 0.0), 0);
        CHECK(arma::abs(phi - 1.0).max() < 1e-14);
    }
    SECTION("unit diagonal at lag zero") {
        const arma::cx_mat phi = prb_covariance(geom, profile_kmh(30.0, 1.0), 0);
        CHECK(arma::abs(phi.diag() - 1.0).max() < 1e-12);
    }
    SECTION("eigenvalues stay above the clipping band") {
        const ChannelProfile p = profile_kmh(50.0, 1.0);
        const arma::cx_mat phi = prb_covariance(geom, p, 0);
        const auto d = numerics::hermitian_eig(phi);
        CHECK(d.eigenvalues.min() >= -1e-10 * p.coeff_variance * geom.block_length());
    }
    SECTION("Kronecker eigenvalue factorization") {
        const ChannelProfile p = profile_kmh(80.0, 1.5);
        const arma::cx_mat phi = prb_covariance(geom, p, 0);
        const auto d = numerics::hermitian_eig(phi);

        arma::vec t_eigs;
        arma::eig_sym(t_eigs, arma::conv_to<arma::cx_mat>::from(
                                  temporal_correlation(geom, p, 0)));
        arma::vec f_eigs;
        arma::eig_sym(f_eigs, arma::conv_to<arma::cx_mat>::from(spectral_correlation(geom, p)));

        arma::vec products(t_eigs.n_elem * f_eigs.n_elem);
        std::size_t k = 0;
        for (double a : t_eigs)
            for (double b : f_eigs)
                products(k++) = a * b;
        products = arma::sort(products, "descend");
        CHECK(arma::abs(products - d.eigenvalues).max() < 1e-8);
    }
}

TEST_CASE("flat channel sampling") {
    CHECK(sample_flat_channels(2, 3, 0, 1).empty());

    const auto set_a = sample_flat_channels(1, 1, 100000, 9);
    double acc = 0.0;
    for (const auto& r : set_a)
        acc += std::norm(r.h_ul(0, 0));
    CHECK(acc / set_a.size() == Catch::Approx(1.0).epsilon(0.03));

    const auto set_b = sample_flat_channels(2, 2, 10, 77);
    const auto set_c = sample_flat_channels(2, 2, 10, 77);
    for (std::size_t i = 0; i < set_b.size(); ++i) {
        CHECK(arma::abs(set_b[i].h_ul - set_c[i].h_ul).max() == 0.0);
        CHECK(arma::abs(set_b[i].h_dl - set_c[i].h_dl).max() == 0.0);
    }
    // uplink and downlink draws are independent
    CHECK(arma::abs(set_b[0].h_ul - set_b[0].h_dl).max() > 0.0);
}

TEST_CASE("prb pair sampling") {
    const PrbGeometry geom;
    SECTION("degenerate profile collapses to one constant per draw") {
        const auto pairs = sample_prb_pair(geom, profile_kmh(0.0, 0.0), 3, 4, 5);
        for (arma::uword j = 0; j < 4; ++j) {
            const arma::cx_vec now = pairs.now.col(j);
            CHECK(arma::abs(now - now(0)).max() < 1e-10);
            CHECK(arma::abs(pairs.future.col(j) - now).max() < 1e-10);
        }
    }
    SECTION("zero lag duplicates the block") {
        const auto pairs = sample_prb_pair(geom, profile_kmh(30.0, 1.0), 0, 6, 11);
        CHECK(arma::abs(pairs.now - pairs.future).max() < 1e-8);
    }
    SECTION("empirical cross-covariance matches the model") {
        const ChannelProfile p = profile_kmh(10.0, 1.0);
        const int lag = 5;
        const std::size_t count = 20000;
        const auto pairs = sample_prb_pair(geom, p, lag, count, 2024);
        const arma::cx_mat emp = pairs.now * pairs.future.t() / double(count);
        const arma::cx_mat phi_lag = prb_covariance(geom, p, lag);
        CHECK(arma::abs(emp - phi_lag).max() < 0.05 * p.coeff_variance);
    }
}
