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

#include "csiregion/estimation.hpp"

#include "csiregion/numerics.hpp"

namespace csiregion::estimation {

namespace {

arma::cx_mat pilot_gram(const arma::cx_mat& phi0, const arma::uvec& idx, double pilot_noise) {
    arma::cx_mat m = phi0.submat(idx, idx);
    m.diag() += pilot_noise;
    return m;
}

} // namespace

arma::cx_mat mmse_filter(const arma::cx_mat& phi0, const arma::cx_mat& phi_lag,
                         const arma::mat& selection, double pilot_noise) {
    if (pilot_noise < 0.0)
        throw std::invalid_argument("mmse_filter: pilot noise must be nonnegative");
    if (phi0.n_rows != phi0.n_cols || phi_lag.n_rows != phi_lag.n_cols ||
        phi0.n_rows != phi_lag.n_rows || selection.n_cols != phi0.n_rows)
        throw std::invalid_argument("mmse_filter: inconsistent dimensions");

    const arma::cx_mat s(selection, arma::mat(selection.n_rows, selection.n_cols, arma::fill::zeros));
    arma::cx_mat inner = s * phi0 * s.t();
    inner.diag() += pilot_noise;
    // G^H = inner^-1 (S phi_lag^H), so G = phi_lag S^H inner^-1.
    return numerics::herm_solve(inner, s * phi_lag.t()).t();
}

MsePerSymbol estimation_mse(const channel::PrbGeometry& geom,
                            const channel::ChannelProfile& profile,
                            const pilots::PilotPattern& pattern, double pilot_noise,
                            int block_lag) {
    if (pattern.positions.empty())
        throw std::invalid_argument("estimation_mse: empty pilot pattern");
    if (pilot_noise < 0.0)
        throw std::invalid_argument("estimation_mse: pilot noise must be nonnegative");

    const arma::cx_mat phi0 = channel::prb_covariance(geom, profile, 0);
    const arma::cx_mat phi_lag =
        block_lag == 0 ? phi0 : channel::prb_covariance(geom, profile, block_lag);
    const arma::uvec idx = pattern.stacked_indices();

    // B = S Phi_lag^H restricted to pilot rows; the Gram diagonal of
    // B^H M^+ B is the explained signal power per resource element. The
    // pseudo-inverse is the continuous sigma_p^2 -> 0 limit, which keeps the
    // full-pilot zero-noise corner exact.
    const arma::cx_mat b = arma::cx_mat(phi_lag.t()).rows(idx);
    const arma::cx_mat m = pilot_gram(phi0, idx, pilot_noise);
    const arma::cx_mat x = numerics::herm_pinv_solve(m, b);

    const double e = profile.coeff_variance;
    MsePerSymbol mse;
    mse.block_lag = block_lag;
    mse.values.set_size(phi0.n_rows);
    for (arma::uword i = 0; i < phi0.n_rows; ++i) {
        const double explained = std::real(arma::cdot(b.col(i), x.col(i)));
        mse.values(i) = std::max(0.0, e - explained);
    }
    return mse;
}

EstimationNoise noise_ratio(const MsePerSymbol& mse, double coeff_variance,
                            Reduction reduction) {
    if (mse.values.is_empty())
        throw std::invalid_argument("noise_ratio: empty MSE vector");
    const double m = reduction == Reduction::Max ? mse.values.max()
                                                 : arma::mean(mse.values);
    if (m >= coeff_variance)
        throw UnusableLink("noise_ratio: MSE reaches the channel power, link unusable");
    return EstimationNoise{m / (coeff_variance - m)};
}

double cramer_rao_noise(double pilot_noise, unsigned n_pilots, double pilot_power) {
    if (n_pilots == 0 || !(pilot_power > 0.0))
        throw std::invalid_argument("cramer_rao_noise: needs pilots with positive power");
    return pilot_noise / (static_cast<double>(n_pilots) * pilot_power);
}

} // namespace csiregion::estimation
