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

#include "csiregion/pilots.hpp"

namespace csiregion::estimation {

/// OFDM-symbol-wise mean-square error of the MMSE channel estimate across
/// one PRB, in units of E{|h|^2}; entries are clamped at zero from below.
struct MsePerSymbol {
    arma::vec values;
    int block_lag = 0;
};

/// Relative noise power of an imperfectness variance sigma^2 consumed by the
/// simplified capacity model.
struct EstimationNoise {
    double sigma_sq = 0.0;
};

/// Scalar reduction of the per-symbol MSE vector. The max reduction follows
/// the dominance argument used for the sigma^2 values; mean is available for
/// sensitivity studies.
enum class Reduction { Max, Mean };

/// Linear MMSE filter Phi_lag S^H (S Phi_0 S^H + sigma_p^2 I)^-1 of size
/// L x N_ppos. With phi_lag = phi0 this is the estimator G; with
/// phi_lag = Phi_hh(N_d) it is the predictor G_P. Throws NumericFailure when
/// the inner matrix is singular (sigma_p^2 = 0 with degenerate Phi).
arma::cx_mat mmse_filter(const arma::cx_mat& phi0, const arma::cx_mat& phi_lag,
                         const arma::mat& selection, double pilot_noise);

/// Per-symbol estimation (lag 0) or prediction (lag N_d) MSE:
///   E{|h|^2} 1 - diag(Phi(N_d) S^H (S Phi(0) S^H + sigma_p^2 I)^-1 S Phi(N_d)^H).
/// The trailing conjugate transpose makes the expression the Gram form of
/// the MMSE filter output, so diag(Phi_hbar_hbar) = E{|h|^2} 1 - MSE holds
/// exactly and the value matches the empirical MSE of sampled PRB pairs.
MsePerSymbol estimation_mse(const channel::PrbGeometry& geom,
                            const channel::ChannelProfile& profile,
                            const pilots::PilotPattern& pattern, double pilot_noise,
                            int block_lag);

/// sigma^2 = m / (E{|h|^2} - m) with m the reduced MSE. Produces
/// sigma^2_UL,BS from the UL pattern and sigma^2_DL,UT from the DL pattern
/// at lag 0. Throws UnusableLink when m >= E{|h|^2}.
EstimationNoise noise_ratio(const MsePerSymbol& mse, double coeff_variance,
                            Reduction reduction = Reduction::Max);

/// Cramer-Rao shortcut sigma^2 = sigma_p^2 / (N_pilots p_pilot), kept as an
/// optional mode for comparison against the MMSE-based methodology.
double cramer_rao_noise(double pilot_noise, unsigned n_pilots, double pilot_power = 1.0);

} // namespace csiregion::estimation
