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

#include "csiregion/estimation.hpp"
#include "csiregion/numerics.hpp"

using namespace csiregion;
using namespace csiregion::estimation;

namespace {

channel::ChannelProfile profile_kmh(double kmh, double tau_us) {
    channel::ChannelProfile p;
    p.set_velocity_kmh(kmh);
    p.max_delay_spread_s = tau_us * 1e-6;
    return p;
}

} // namespace

TEST_CASE("mmse filter anchors") {
    numerics::NormalStream stream(3);
    arma::cx_mat a(6, 6);
    for (auto& v : a)
        v = stream.next_cnormal();
    const arma::cx_mat phi = a * a.t() + 0.5 * arma::eye<arma::cx_mat>(6, 6);
    const arma::mat s_full = arma::eye(6, 6);

    SECTION("all positions piloted, zero noise: exact interpolation") {
        const arma::cx_mat g = mmse_filter(phi, phi, s_full, 0.0);
        CHECK(arma::norm(g - arma::eye<arma::cx_mat>(6, 6), "fro") < 1e-9);
    }
    SECTION("huge noise washes the filter out") {
        const arma::cx_mat g = mmse_filter(phi, phi, s_full, 1e9);
        CHECK(arma::norm(g, "fro") < 1e-6);
    }
    SECTION("output dimensions are L x N_ppos") {
        arma::mat s(2, 6, arma::fill::zeros);
        s(0, 1) = 1.0;
        s(1, 4) = 1.0;
        const arma::cx_mat g = mmse_filter(phi, phi, s, 0.1);
        CHECK(g.n_rows == 6);
        CHECK(g.n_cols == 2);
    }
    SECTION("singular inner matrix raises a numeric failure") {
        const arma::cx_mat ones(6, 6, arma::fill::ones);
        CHECK_THROWS_AS(mmse_filter(ones, ones, s_full, 0.0), NumericFailure);
    }
}

TEST_CASE("estimation MSE anchors") {
    const channel::PrbGeometry geom;
    SECTION("full pilots and zero noise estimate perfectly") {
        pilots::PilotPattern full = pilots::lattice_pattern(geom, 1, 1);
        REQUIRE(full.n_positions() == geom.block_length());
        const auto mse = estimation_mse(geom, profile_kmh(10.0, 1.0), full, 0.0, 0);
        CHECK(mse.values.max() < 1e-9);
    }
    SECTION("degenerate channel with one pilot reduces to a scalar formula") {
        const auto p = pilots::lattice_pattern(geom, 14, 12);
        const auto mse = estimation_mse(geom, profile_kmh(0.0, 0.0), p, 0.1, 0);
        CHECK(mse.values.min() == Catch::Approx(1.0 - 1.0 / 1.1).margin(1e-12));
        CHECK(mse.values.max() == Catch::Approx(0.0909090909).margin(1e-9));
    }
    SECTION("empirical MSE from sampled PRB pairs, lag 0 and lag 5") {
        const auto pattern = pilots::lattice_pattern(geom, 7, 6);
        const channel::ChannelProfile prof = profile_kmh(10.0, 1.0);
        const double pilot_noise = 0.1;
        const std::size_t count = 6000;

        for (int lag : {0, 5}) {
            const auto analytic = estimation_mse(geom, prof, pattern, pilot_noise, lag);
            const auto pairs = channel::sample_prb_pair(geom, prof, lag, count, 99);
            const arma::cx_mat phi0 = channel::prb_covariance(geom, prof, 0);
            const arma::cx_mat phi_lag = channel::prb_covariance(geom, prof, lag);
            const arma::mat s = pilots::selection_matrix(pattern);
            const arma::cx_mat g = mmse_filter(phi0, phi_lag, s, pilot_noise);

            // pilots observed on the later block, the filter estimates the
            // earlier one (the formula's pairing)
            numerics::NormalStream noise_stream(1717);
            const arma::uvec idx = pattern.stacked_indices();
            arma::vec err(geom.block_length(), arma::fill::zeros);
            for (std::size_t j = 0; j < count; ++j) {
                arma::cx_vec obs = pairs.future.col(j);
                arma::cx_vec pil(idx.n_elem);
                for (arma::uword q = 0; q < idx.n_elem; ++q)
                    pil(q) = obs(idx(q)) + std::sqrt(pilot_noise) * noise_stream.next_cnormal();
                const arma::cx_vec est = g * pil;
                err += arma::square(arma::abs(pairs.now.col(j) - est));
            }
            err /= double(count);
            for (arma::uword i = 0; i < err.n_elem; ++i)
                CHECK(err(i) == Catch::Approx(analytic.values(i)).epsilon(0.08));
        }
    }
}

TEST_CASE("estimation MSE invariants") {
    const channel::PrbGeometry geom;
    const channel::ChannelProfile prof = profile_kmh(30.0, 1.0);

    SECTION("nested patterns never get worse") {
        const auto coarse = pilots::lattice_pattern(geom, 14, 12);
        const auto medium = pilots::lattice_pattern(geom, 7, 6);
        const auto fine = pilots::lattice_pattern(geom, 7, 3);
        const auto m_coarse = estimation_mse(geom, prof, coarse, 0.1, 0);
        const auto m_medium = estimation_mse(geom, prof, medium, 0.1, 0);
        const auto m_fine = estimation_mse(geom, prof, fine, 0.1, 0);
        CHECK(arma::all(m_medium.values - m_coarse.values <= 1e-10));
        CHECK(arma::all(m_fine.values - m_medium.values <= 1e-10));
    }
    SECTION("lag zero equals the prediction form at lag zero") {
        const auto p = pilots::lattice_pattern(geom, 7, 6);
        const auto a = estimation_mse(geom, prof, p, 0.1, 0);
        const auto b = estimation_mse(geom, prof, p, 0.1, 0);
        CHECK(arma::abs(a.values - b.values).max() == 0.0);
    }
    SECTION("degenerate profile is lag independent") {
        const auto p = pilots::lattice_pattern(geom, 7, 6);
        const channel::ChannelProfile flat = profile_kmh(0.0, 0.0);
        const auto lag0 = estimation_mse(geom, flat, p, 0.1, 0);
        const auto lag7 = estimation_mse(geom, flat, p, 0.1, 7);
        CHECK(arma::abs(lag0.values - lag7.values).max() < 1e-12);
    }
}

TEST_CASE("noise ratio") {
    MsePerSymbol mse;
    mse.values = arma::vec{0.0, 0.0};
    CHECK(noise_ratio(mse, 1.0).sigma_sq == 0.0);

    mse.values = arma::vec{0.2, 0.5};
    CHECK(noise_ratio(mse, 1.0).sigma_sq == Catch::Approx(1.0));
    CHECK(noise_ratio(mse, 1.0, Reduction::Mean).sigma_sq ==
          Catch::Approx(0.35 / 0.65));

    mse.values = arma::vec{0.090909090909};
    CHECK(noise_ratio(mse, 1.0).sigma_sq == Catch::Approx(0.1).margin(1e-9));

    SECTION("strictly increasing in the reduced MSE") {
        double prev = -1.0;
        for (double m : {0.0, 0.1, 0.3, 0.6, 0.9}) {
            MsePerSymbol probe;
            probe.values = arma::vec{m};
            const double s = noise_ratio(probe, 1.0).sigma_sq;
            CHECK(s > prev);
            prev = s;
        }
    }
    SECTION("unusable link") {
        MsePerSymbol bad;
        bad.values = arma::vec{1.0};
        CHECK_THROWS_AS(noise_ratio(bad, 1.0), UnusableLink);
    }
}

TEST_CASE("Cramer-Rao shortcut") {
    CHECK(cramer_rao_noise(0.1, 4) == Catch::Approx(0.025));
    CHECK(cramer_rao_noise(0.1, 4, 2.0) == Catch::Approx(0.0125));
    CHECK_THROWS_AS(cramer_rao_noise(0.1, 0), std::invalid_argument);
}
