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

#include "csiregion/estimation.hpp"

namespace csiregion::feedback {

enum class FeedbackMode { Redundant, Successive };

/// CSI feedback configuration: bits per spatial coefficient per PRB, rank of
/// the decorrelation basis, and the feedback delay in TTIs.
struct FeedbackConfig {
    double bits_per_coeff = 0.0; // N_b, continuous-valued
    unsigned rank = 2;           // N_rank
    int delay_ttis = 5;          // N_d
    FeedbackMode mode = FeedbackMode::Redundant;
};

/// The three imperfectness variances consumed by the simplified model, plus
/// the TDM variant of the terminal-side value. Entries above
/// `unusable_sentinel` mark links whose estimate carries no information;
/// they force zero rate downstream while keeping lookup tables finite.
struct CsiQuality {
    double sigma_ul_bs = 0.0;
    double sigma_dl_ut = 0.0;
    double sigma_dl_ut_tdm = 0.0;
    double sigma_dl_bs = 0.0;

    static constexpr double unusable_sentinel = 1e300;
};

/// Covariance of the predicted channel estimate at the MMSE filter output:
///   Phi_hbar = Phi(N_d) S^H (S Phi(0) S^H + sigma_p^2 I)^-1 S Phi(N_d)^H,
/// Hermitian PSD up to clipping.
arma::cx_mat predicted_covariance(const channel::PrbGeometry& geom,
                                  const channel::ChannelProfile& profile,
                                  const pilots::PilotPattern& pattern, double pilot_noise,
                                  int block_lag);

/// The N_rank eigenvectors of phi with the strongest eigenvalues, orthonormal
/// and phase-fixed by the numerics kernel.
arma::cx_mat decorrelation_basis(const arma::cx_mat& phi, unsigned rank);

/// Quantizer noise scale 2^(-max(0, N_b / N_rank - 2)): equal bits per
/// decorrelated coefficient, one bit lost per real dimension.
double quantization_scale(double bits_per_coeff, unsigned rank);

/// Quantization noise covariance Phi_qq = scale * V V^H phi V V^H (L x L).
arma::cx_mat quantization_noise(const arma::cx_mat& phi, const arma::cx_mat& basis,
                                double bits_per_coeff, unsigned rank);

/// Covariance of the prediction conditioned on the previously fed-back
/// estimate (quantized with prev_bits): Phi_hbar minus the Schur complement
/// through the cross-covariance
///   beta G_P (S Phi(-1) S^H + sigma_p^2 I) G_P^H V V^H,
/// beta = sqrt(1 - 2^(-max(prev_bits/rank - 2, 0))). The inner inverse is a
/// thresholded pseudo-inverse on the range of the quantized-estimate
/// covariance V V^H Phi_hbar V V^H; the result is clipped PSD.
arma::cx_mat conditional_covariance(const channel::PrbGeometry& geom,
                                    const channel::ChannelProfile& profile,
                                    const pilots::PilotPattern& pattern, double pilot_noise,
                                    int block_lag, double prev_bits, unsigned rank);

/// Transmitter-side per-symbol MSE of the predicted channel. Redundant mode
/// quantizes each prediction independently; successive mode quantizes the
/// innovation left after conditioning on the previous feedback (prev_bits),
/// so both modes coincide when beta = 0.
estimation::MsePerSymbol csit_mse(const channel::PrbGeometry& geom,
                                  const channel::ChannelProfile& profile,
                                  const pilots::PilotPattern& pattern, double pilot_noise,
                                  const FeedbackConfig& fb, double prev_bits = 0.0);

/// Steady state of the successive scheme: the unconditioned bit budget N_b'
/// whose redundant max-MSE the scheme sustains, found by bisection of
///   g(x) = max MSE_successive(x, N_b) - max MSE_redundant(x)
/// on [N_b, 64] to 1e-6 bits. Without a sign change in the bracket the
/// nearer endpoint is returned with the degenerate flag set.
struct SteadyState {
    double equivalent_bits = 0.0;
    bool degenerate = false;
};
SteadyState steady_state_equivalent_bits(const channel::PrbGeometry& geom,
                                         const channel::ChannelProfile& profile,
                                         const pilots::PilotPattern& pattern,
                                         double pilot_noise, const FeedbackConfig& fb);

/// sigma^2_DL,BS = max(0, (max MSE_CSIT - max MSE_CSIR) / (E - max MSE_CSIR)).
/// Throws UnusableLink when the denominator is not positive.
double csit_noise_ratio(const estimation::MsePerSymbol& mse_csit,
                        const estimation::MsePerSymbol& mse_csir, double coeff_variance);

} // namespace csiregion::feedback
