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

#include "csiregion/common.hpp"

namespace csiregion::capacity {

/// Noise and power budget of the scenario. All sigma entries are variances.
struct LinkBudget {
    double sigma_ul = 0.1;    // receiver noise, uplink
    double sigma_dl = 0.1;    // receiver noise, downlink
    double sigma_pilot = 0.1; // pilot observation noise
    double p_max_ul = 1.0;    // per-terminal uplink power cap
    double p_tot_dl = 1.0;    // base-station sum power
};

/// Effective uplink channel under imperfect receiver CSI: the channel is
/// reduced in power and the estimation error appears as extra noise with
/// per-entry amplitude e_bar.
struct EffectiveUplink {
    arma::cx_mat h_eff; // N_BS x K
    arma::mat e_bar;    // N_BS x K
};

/// Effective downlink channel of the spatial-multiplexing path, with the
/// terminal-side and base-station-side CSI error amplitudes per terminal.
struct EffectiveDownlink {
    arma::cx_mat h_eff; // N_BS x K columns per terminal
    arma::vec e_ut;     // per-terminal e_bar at the terminal side
    arma::vec e_bs;     // per-terminal e_bar at the base-station side
};

/// Power-reduced effective scalars of the TDM fallback, one per terminal.
/// Noise entries stay within [0, P_tot E{|h|^2}].
struct TdmEffective {
    arma::cx_vec h_eff;
    arma::vec noise;
};

/// A gross sum rate in bits per channel access together with the power
/// allocation that achieved it.
struct RateResult {
    double rate = 0.0;
    arma::vec powers;
};

/// h_eff = h / sqrt(1 + sigma^2/E), e_bar = sqrt(E sigma^2 / (E + sigma^2));
/// the squared scale and e_bar^2 add up to E exactly.
EffectiveUplink ul_effective_params(const arma::cx_mat& h_ul, double coeff_variance,
                                    double sigma_ul_bs);

/// Gross uplink sum rate max_P log2 |I + Phi^-1 H P H^H| over diagonal P
/// with 0 <= p_k <= p_max, Phi = sigma_ul I + diag(diag(Ebar P Ebar^T)).
/// Coordinate ascent with a golden-section line search per terminal, started
/// at full power.
RateResult ul_sum_rate(const EffectiveUplink& eff, double sigma_ul, double p_max);

/// h_eff = h sqrt(max(0, E - sigma_bs^2) / (E + sigma_ut^2)) with the two
/// error amplitudes of the modified downlink transmission.
EffectiveDownlink dl_effective_params(const arma::cx_mat& h_dl, double coeff_variance,
                                      double sigma_dl_ut, double sigma_dl_bs);

/// Gross downlink sum rate through uplink/downlink duality: the dual-uplink
/// powers p~ (sum <= p_tot) maximize a sum of log-det ratios whose
/// denominators carry inter-terminal interference plus both CSI noise terms
/// plus sigma_dl I. Projected coordinate ascent with K+1 starts.
RateResult dl_sum_rate(const EffectiveDownlink& eff, double sigma_dl, double p_tot);

/// Effective scalars of TDM with an uninformed unit-norm beam; the terminal
/// estimates one coefficient whose quality is sigma_dl_ut_tdm.
TdmEffective tdm_effective_params(const arma::cx_mat& h_dl, double coeff_variance,
                                  double sigma_dl_ut_tdm, double p_tot);

/// TDM gross rate (1/K) sum_k log2(1 + |h_eff_k|^2 / (noise_k + sigma_dl)).
double tdm_sum_rate(const arma::cx_mat& h_dl, double coeff_variance,
                    double sigma_dl_ut_tdm, double sigma_dl, double p_tot);

} // namespace csiregion::capacity
