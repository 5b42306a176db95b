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
#include <cstdint>
#include <vector>

#include "csiregion/common.hpp"

namespace csiregion::channel {

inline constexpr double speed_of_light_mps = 299'792'458.0;

/// One physical resource block: N_s OFDM symbols by N_c subcarriers.
struct PrbGeometry {
    unsigned n_symbols = 14;
    unsigned n_subcarriers = 12;
    double symbol_rate_hz = 14'000.0;
    double subcarrier_spacing_hz = 15'000.0;

    unsigned block_length() const { return n_symbols * n_subcarriers; }
    void validate() const;
};

/// WSSUS fading statistics of one link. Velocity is stored in m/s; configs
/// accept km/h at the boundary.
struct ChannelProfile {
    double carrier_freq_hz = 2.6e9;
    double velocity_mps = 0.0;
    double max_delay_spread_s = 0.0;
    double coeff_variance = 1.0; // E{|h|^2}

    double doppler_hz() const { return carrier_freq_hz * velocity_mps / speed_of_light_mps; }
    void set_velocity_kmh(double kmh) { velocity_mps = kmh / 3.6; }
    void validate() const;
};

/// Flat-fading realization of the uplink and downlink channel matrices
/// (N_BS x K each, independent draws per link).
struct ChannelRealization {
    arma::cx_mat h_ul;
    arma::cx_mat h_dl;
};

/// Column-major stack of PRB pair samples: column j of `now` and `future`
/// holds one (h_t, h_{t+N_d}) draw of length N_s * N_c.
struct PrbPairSamples {
    arma::cx_mat now;
    arma::cx_mat future;
};

/// Temporal correlation Pi_T(N_d) across OFDM symbols: entry (i, j) is
/// J0(2 pi f_D (N_d N_s + j - i) / f_s) with 1-based (i, j).
/// Throws std::invalid_argument for negative lag.
arma::mat temporal_correlation(const PrbGeometry& geom, const ChannelProfile& profile,
                               int block_lag);

/// Spectral correlation Pi_F across subcarriers: symmetric Toeplitz with
/// si(2 pi tau_max dF d) at lag d.
arma::mat spectral_correlation(const PrbGeometry& geom, const ChannelProfile& profile);

/// PRB covariance Phi_hh(N_d) = E{|h|^2} (Pi_T(N_d) kron Pi_F), stacking
/// symbol-major (time outer, subcarrier inner).
arma::cx_mat prb_covariance(const PrbGeometry& geom, const ChannelProfile& profile,
                            int block_lag);

/// i.i.d. CN(0, E{|h|^2}) channel matrices, uplink and downlink independent.
/// Deterministic given seed.
std::vector<ChannelRealization> sample_flat_channels(unsigned n_bs, unsigned k,
                                                     std::size_t count, std::uint64_t seed,
                                                     double coeff_variance = 1.0);

/// Joint Gaussian PRB pairs with diagonal blocks Phi_hh(0) and cross block
/// Phi_hh(N_d), used as the empirical oracle for the analytic MSE formulas.
PrbPairSamples sample_prb_pair(const PrbGeometry& geom, const ChannelProfile& profile,
                               int block_lag, std::size_t count, std::uint64_t seed);

} // namespace csiregion::channel
