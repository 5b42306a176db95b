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

#include "csiregion/channel.hpp"

#include <cmath>

#include "csiregion/numerics.hpp"

namespace csiregion::channel {

void PrbGeometry::validate() const {
    if (n_symbols == 0 || n_subcarriers == 0)
        throw std::invalid_argument("PrbGeometry: symbol and subcarrier counts must be positive");
    if (!(symbol_rate_hz > 0.0) || !(subcarrier_spacing_hz > 0.0))
        throw std::invalid_argument("PrbGeometry: rates must be positive");
}

void ChannelProfile::validate() const {
    if (!(carrier_freq_hz > 0.0))
        throw std::invalid_argument("ChannelProfile: carrier frequency must be positive");
    if (!(coeff_variance > 0.0))
        throw std::invalid_argument("ChannelProfile: coefficient variance must be positive");
    if (velocity_mps < 0.0 || max_delay_spread_s < 0.0)
        throw std::invalid_argument("ChannelProfile: velocity and delay spread must be nonnegative");
    if (!std::isfinite(velocity_mps) || !std::isfinite(max_delay_spread_s))
        throw std::invalid_argument("ChannelProfile: non-finite parameter");
}

arma::mat temporal_correlation(const PrbGeometry& geom, const ChannelProfile& profile,
                               int block_lag) {
    geom.validate();
    profile.validate();
    if (block_lag < 0)
        throw std::invalid_argument("temporal_correlation: negative block lag");

    const unsigned n = geom.n_symbols;
    const double f_d = profile.doppler_hz();
    arma::mat pi_t(n, n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            const double symbol_lag = static_cast<double>(block_lag) * n +
                                      (static_cast<double>(j) - static_cast<double>(i));
            pi_t(i, j) = numerics::bessel_j0(2.0 * arma::datum::pi * f_d * symbol_lag /
                                             geom.symbol_rate_hz);
        }
    return pi_t;
}

arma::mat spectral_correlation(const PrbGeometry& geom, const ChannelProfile& profile) {
    geom.validate();
    profile.validate();

    const unsigned n = geom.n_subcarriers;
    arma::vec lag_corr(n);
    for (unsigned d = 0; d < n; ++d)
        lag_corr(d) = numerics::si(2.0 * arma::datum::pi * profile.max_delay_spread_s *
                                   geom.subcarrier_spacing_hz * d);

    arma::mat pi_f(n, n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j)
            pi_f(i, j) = lag_corr(i > j ? i - j : j - i);
    return pi_f;
}

arma::cx_mat prb_covariance(const PrbGeometry& geom, const ChannelProfile& profile,
                            int block_lag) {
    const arma::mat pi_t = temporal_correlation(geom, profile, block_lag);
    const arma::mat pi_f = spectral_correlation(geom, profile);
    const arma::mat phi = profile.coeff_variance * arma::kron(pi_t, pi_f);
    return arma::cx_mat(phi, arma::mat(phi.n_rows, phi.n_cols, arma::fill::zeros));
}

std::vector<ChannelRealization> sample_flat_channels(unsigned n_bs, unsigned k,
                                                     std::size_t count, std::uint64_t seed,
                                                     double coeff_variance) {
    if (n_bs == 0 || k == 0)
        throw std::invalid_argument("sample_flat_channels: dimensions must be positive");
    if (!(coeff_variance > 0.0))
        throw std::invalid_argument("sample_flat_channels: coefficient variance must be positive");

    const double amp = std::sqrt(coeff_variance);
    std::vector<ChannelRealization> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        // One stream per realization so the set is independent of how many
        // realizations any caller consumes.
        numerics::NormalStream stream(numerics::mix_seed(seed, r));
        ChannelRealization real;
        real.h_ul.set_size(n_bs, k);
        real.h_dl.set_size(n_bs, k);
        for (arma::uword j = 0; j < k; ++j)
            for (arma::uword i = 0; i < n_bs; ++i)
                real.h_ul(i, j) = amp * stream.next_cnormal();
        for (arma::uword j = 0; j < k; ++j)
            for (arma::uword i = 0; i < n_bs; ++i)
                real.h_dl(i, j) = amp * stream.next_cnormal();
        out.push_back(std::move(real));
    }
    return out;
}

PrbPairSamples sample_prb_pair(const PrbGeometry& geom, const ChannelProfile& profile,
                               int block_lag, std::size_t count, std::uint64_t seed) {
    if (block_lag < 0)
        throw std::invalid_argument("sample_prb_pair: negative block lag");

    const unsigned len = geom.block_length();
    const arma::cx_mat phi0 = prb_covariance(geom, profile, 0);
    const arma::cx_mat phi_lag = prb_covariance(geom, profile, block_lag);

    arma::cx_mat joint(2 * len, 2 * len);
    joint.submat(0, 0, len - 1, len - 1) = phi0;
    joint.submat(len, len, 2 * len - 1, 2 * len - 1) = phi0;
    joint.submat(0, len, len - 1, 2 * len - 1) = phi_lag;
    joint.submat(len, 0, 2 * len - 1, len - 1) = phi_lag.t();

    const arma::cx_mat samples = numerics::sample_correlated(joint, count, seed);
    PrbPairSamples out;
    out.now = samples.rows(0, len - 1);
    out.future = samples.rows(len, 2 * len - 1);
    return out;
}

} // namespace csiregion::channel
