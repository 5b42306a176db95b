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

#include "csiregion/feedback.hpp"

#include <cmath>

#include "csiregion/numerics.hpp"

namespace csiregion::feedback {

namespace {

double beta_from_bits(double bits, unsigned rank) {
    return std::sqrt(1.0 - quantization_scale(bits, rank));
}

/// Everything about one (pattern, profile, lag) tuple that the successive
/// chain reuses across bisection iterations.
struct PredictionContext {
    arma::cx_mat phi_pred;     // Phi_hbar_hbar, symmetrized
    arma::vec diag_pred;       // real diagonal of phi_pred
    arma::cx_mat cross_base;   // G_P (S Phi(-1) S^H + sigma_p^2 I) G_P^H V V^H, beta = 1
    arma::cx_mat basis;        // top-rank eigenvectors of phi_pred
    arma::vec basis_values;    // their eigenvalues
    double coeff_variance = 0.0;
};

PredictionContext make_context(const channel::PrbGeometry& geom,
                               const channel::ChannelProfile& profile,
                               const pilots::PilotPattern& pattern, double pilot_noise,
                               int block_lag, unsigned rank) {
    PredictionContext ctx;
    ctx.coeff_variance = profile.coeff_variance;
    ctx.phi_pred = predicted_covariance(geom, profile, pattern, pilot_noise, block_lag);
    ctx.diag_pred = arma::real(ctx.phi_pred.diag());

    const numerics::EigenDecomposition eig = numerics::hermitian_eig(ctx.phi_pred);
    if (rank > eig.eigenvectors.n_cols)
        throw std::invalid_argument("feedback: rank exceeds the block length");
    ctx.basis = eig.eigenvectors.cols(0, rank - 1);
    ctx.basis_values = eig.eigenvalues.subvec(0, rank - 1);

    const arma::cx_mat phi0 = channel::prb_covariance(geom, profile, 0);
    const arma::cx_mat phi_lag =
        block_lag == 0 ? phi0 : channel::prb_covariance(geom, profile, block_lag);
    const arma::uvec idx = pattern.stacked_indices();
    arma::cx_mat gram = phi0.submat(idx, idx);
    gram.diag() += pilot_noise;
    const arma::cx_mat g_p =
        numerics::herm_pinv_solve(gram, arma::cx_mat(phi_lag.t()).rows(idx)).t(); // predictor G_P

    // Lag -1 covariance via transpose: Pi_T(-1) = Pi_T(1)^T and Pi_F is
    // symmetric, J0 and si being even keeps everything real.
    const arma::cx_mat phi_m1 = channel::prb_covariance(geom, profile, 1).st();
    arma::cx_mat inner = phi_m1.submat(idx, idx);
    inner.diag() += pilot_noise;

    const arma::cx_mat vvh = ctx.basis * ctx.basis.t();
    ctx.cross_base = g_p * inner * g_p.t() * vvh;
    return ctx;
}

/// Successive-mode per-symbol CSIT MSE for a given previous bit budget.
/// One eigendecomposition per call; the conditional covariance is clipped
/// PSD through its spectrum.
arma::vec successive_mse(const PredictionContext& ctx, double prev_bits, double fresh_bits,
                         unsigned rank) {
    const double beta = beta_from_bits(prev_bits, rank);
    arma::cx_mat phi_cond = ctx.phi_pred;
    if (beta > 0.0) {
        const arma::cx_mat d = (beta * ctx.cross_base) * ctx.basis; // L x rank
        arma::vec inv(rank, arma::fill::zeros);
        const double spectral = std::abs(ctx.basis_values(0));
        for (unsigned i = 0; i < rank; ++i)
            if (std::abs(ctx.basis_values(i)) > 1e-10 * spectral)
                inv(i) = 1.0 / ctx.basis_values(i);
        phi_cond -= d * arma::diagmat(arma::conv_to<arma::cx_vec>::from(inv)) * d.t();
        phi_cond = 0.5 * (phi_cond + phi_cond.t());
    }

    const numerics::EigenDecomposition eig = numerics::hermitian_eig(phi_cond);
    const arma::vec values = arma::clamp(eig.eigenvalues, 0.0, arma::datum::inf);
    const arma::mat weight = arma::square(arma::abs(eig.eigenvectors));

    // diag of the clipped conditional covariance and of its rank-reduced
    // projection, straight from the spectrum.
    const arma::vec diag_cond = weight * values;
    arma::vec values_top = values;
    if (values_top.n_elem > rank)
        values_top.subvec(rank, values_top.n_elem - 1).zeros();
    const arma::vec diag_top = weight * values_top;

    const double scale = quantization_scale(fresh_bits, rank);
    arma::vec mse = ctx.coeff_variance - ctx.diag_pred + diag_cond - (1.0 - scale) * diag_top;
    return arma::clamp(mse, 0.0, ctx.coeff_variance);
}

/// Redundant-mode per-symbol CSIT MSE from the precomputed context.
arma::vec redundant_mse(const PredictionContext& ctx, double bits, unsigned rank) {
    const arma::mat weight = arma::square(arma::abs(ctx.basis)); // L x rank
    const arma::vec diag_top = weight * arma::clamp(ctx.basis_values, 0.0, arma::datum::inf);
    const double scale = quantization_scale(bits, rank);
    arma::vec mse = ctx.coeff_variance - (1.0 - scale) * diag_top;
    return arma::clamp(mse, 0.0, ctx.coeff_variance);
}

} // namespace

arma::cx_mat predicted_covariance(const channel::PrbGeometry& geom,
                                  const channel::ChannelProfile& profile,
                                  const pilots::PilotPattern& pattern, double pilot_noise,
                                  int block_lag) {
    if (pattern.positions.empty())
        throw std::invalid_argument("predicted_covariance: empty pilot pattern");

    const arma::cx_mat phi0 = channel::prb_covariance(geom, profile, 0);
    const arma::cx_mat phi_lag =
        block_lag == 0 ? phi0 : channel::prb_covariance(geom, profile, block_lag);
    const arma::uvec idx = pattern.stacked_indices();

    const arma::cx_mat b = arma::cx_mat(phi_lag.t()).rows(idx); // S Phi_lag^H
    arma::cx_mat m = phi0.submat(idx, idx);
    m.diag() += pilot_noise;

    arma::cx_mat phi_pred = b.t() * numerics::herm_pinv_solve(m, b);
    return 0.5 * (phi_pred + phi_pred.t());
}

arma::cx_mat decorrelation_basis(const arma::cx_mat& phi, unsigned rank) {
    if (rank == 0 || rank > phi.n_rows)
        throw std::invalid_argument("decorrelation_basis: rank must be in [1, L]");
    const numerics::EigenDecomposition eig = numerics::hermitian_eig(phi);
    return eig.eigenvectors.cols(0, rank - 1);
}

double quantization_scale(double bits_per_coeff, unsigned rank) {
    if (rank == 0)
        throw std::invalid_argument("quantization_scale: rank must be >= 1");
    if (!(bits_per_coeff >= 0.0))
        throw std::invalid_argument("quantization_scale: bits must be nonnegative");
    return std::exp2(-std::max(0.0, bits_per_coeff / rank - 2.0));
}

arma::cx_mat quantization_noise(const arma::cx_mat& phi, const arma::cx_mat& basis,
                                double bits_per_coeff, unsigned rank) {
    const arma::cx_mat projected = basis * (basis.t() * phi * basis) * basis.t();
    return quantization_scale(bits_per_coeff, rank) * projected;
}

arma::cx_mat conditional_covariance(const channel::PrbGeometry& geom,
                                    const channel::ChannelProfile& profile,
                                    const pilots::PilotPattern& pattern, double pilot_noise,
                                    int block_lag, double prev_bits, unsigned rank) {
    if (!(prev_bits >= 0.0))
        throw std::invalid_argument("conditional_covariance: prev_bits must be nonnegative");

    const PredictionContext ctx =
        make_context(geom, profile, pattern, pilot_noise, block_lag, rank);
    const double beta = beta_from_bits(prev_bits, rank);
    if (beta == 0.0)
        return ctx.phi_pred; // previous feedback carried no information

    const arma::cx_mat d = (beta * ctx.cross_base) * ctx.basis;
    arma::vec inv(rank, arma::fill::zeros);
    const double spectral = std::abs(ctx.basis_values(0));
    for (unsigned i = 0; i < rank; ++i)
        if (std::abs(ctx.basis_values(i)) > 1e-10 * spectral)
            inv(i) = 1.0 / ctx.basis_values(i);
    arma::cx_mat phi_cond =
        ctx.phi_pred - d * arma::diagmat(arma::conv_to<arma::cx_vec>::from(inv)) * d.t();
    return numerics::clip_psd(phi_cond);
}

estimation::MsePerSymbol csit_mse(const channel::PrbGeometry& geom,
                                  const channel::ChannelProfile& profile,
                                  const pilots::PilotPattern& pattern, double pilot_noise,
                                  const FeedbackConfig& fb, double prev_bits) {
    const PredictionContext ctx =
        make_context(geom, profile, pattern, pilot_noise, fb.delay_ttis, fb.rank);
    estimation::MsePerSymbol mse;
    mse.block_lag = fb.delay_ttis;
    if (fb.mode == FeedbackMode::Redundant)
        mse.values = redundant_mse(ctx, fb.bits_per_coeff, fb.rank);
    else
        mse.values = successive_mse(ctx, prev_bits, fb.bits_per_coeff, fb.rank);
    return mse;
}

SteadyState steady_state_equivalent_bits(const channel::PrbGeometry& geom,
                                         const channel::ChannelProfile& profile,
                                         const pilots::PilotPattern& pattern,
                                         double pilot_noise, const FeedbackConfig& fb) {
    if (fb.mode != FeedbackMode::Successive)
        throw std::invalid_argument("steady_state_equivalent_bits: successive mode required");

    const PredictionContext ctx =
        make_context(geom, profile, pattern, pilot_noise, fb.delay_ttis, fb.rank);
    const double residual_tol = 1e-9 * ctx.coeff_variance;

    const auto g = [&](double x) {
        return successive_mse(ctx, x, fb.bits_per_coeff, fb.rank).max() -
               redundant_mse(ctx, x, fb.rank).max();
    };

    double lo = fb.bits_per_coeff;
    double hi = std::max(64.0, lo);
    double g_lo = g(lo);
    if (std::abs(g_lo) <= residual_tol)
        return {lo, false};
    double g_hi = g(hi);
    if (std::abs(g_hi) <= residual_tol)
        return {hi, false};
    if ((g_lo > 0.0) == (g_hi > 0.0)) {
        // No sign change: successive is uniformly better (static-like
        // channels) or uniformly worse than the redundant sweep.
        return {g_lo > 0.0 ? lo : hi, true};
    }

    double mid = lo;
    for (int iter = 0; iter < 80; ++iter) {
        mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (std::abs(g_mid) <= residual_tol && hi - lo <= 1e-6)
            break;
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-6 && iter >= 26)
            break;
    }
    return {0.5 * (lo + hi), false};
}

double csit_noise_ratio(const estimation::MsePerSymbol& mse_csit,
                        const estimation::MsePerSymbol& mse_csir, double coeff_variance) {
    const double max_csit = mse_csit.values.max();
    const double max_csir = mse_csir.values.max();
    const double denom = coeff_variance - max_csir;
    if (!(denom > 0.0))
        throw UnusableLink("csit_noise_ratio: receiver-side MSE reaches the channel power");
    return std::max(0.0, (max_csit - max_csir) / denom);
}

} // namespace csiregion::feedback
