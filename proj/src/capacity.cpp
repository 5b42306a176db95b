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

#include "csiregion/capacity.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace csiregion::capacity {

namespace {

constexpr double rate_tol = 1e-7; // sweep convergence, in bits
constexpr int max_sweeps = 200;

/// Golden-section maximization on [lo, hi] including both endpoints, so the
/// monotone case returns the boundary exactly.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo,
                                     double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 60 && (b - a) > 1e-7 * (hi - lo + 1.0); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    double best_x = f1 >= f2 ? x1 : x2;
    double best_f = std::max(f1, f2);
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx > best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    return {best_x, best_f};
}

/// In-place Cholesky log-determinant of a small Hermitian PD matrix stored
/// column-major. Returns false when a pivot is not positive.
bool chol_logdet(std::complex<double>* m, unsigned n, double& logdet) {
    logdet = 0.0;
    for (unsigned j = 0; j < n; ++j) {
        double pivot = m[j * n + j].real();
        for (unsigned c = 0; c < j; ++c)
            pivot -= std::norm(m[c * n + j]);
        if (!(pivot > 0.0))
            return false;
        const double root = std::sqrt(pivot);
        logdet += 2.0 * std::log(root);
        m[j * n + j] = root;
        for (unsigned i = j + 1; i < n; ++i) {
            std::complex<double> v = m[j * n + i];
            for (unsigned c = 0; c < j; ++c)
                v -= m[c * n + i] * std::conj(m[c * n + j]);
            m[j * n + i] = v / root;
        }
    }
    return true;
}

/// Workspace shared by all objective evaluations of one optimization run;
/// keeps the line searches free of allocations and LAPACK dispatch.
struct ObjectiveWorkspace {
    std::vector<arma::cx_mat> outer; // h_k h_k^H per terminal
    arma::vec error_power;           // per-terminal CSI-noise weight
    arma::mat antenna_noise;         // per-antenna weights when Ebar rows differ
    bool uniform_rows = true;
    std::vector<std::complex<double>> scratch; // assembled matrix / Cholesky
    std::vector<std::complex<double>> solve;
    std::vector<double> noise_diag;
    unsigned n = 0;
    unsigned k = 0;

    void init(const arma::cx_mat& h_eff, const arma::mat& e_bar_sq) {
        n = static_cast<unsigned>(h_eff.n_rows);
        k = static_cast<unsigned>(h_eff.n_cols);
        antenna_noise = e_bar_sq;
        error_power = e_bar_sq.row(0).t();
        uniform_rows = true;
        for (unsigned j = 0; j < k && uniform_rows; ++j)
            if (arma::abs(e_bar_sq.col(j) - e_bar_sq(0, j)).max() > 0.0)
                uniform_rows = false;
        outer.clear();
        outer.reserve(k);
        for (unsigned j = 0; j < k; ++j)
            outer.push_back(h_eff.col(j) * h_eff.col(j).t());
        scratch.resize(static_cast<std::size_t>(n) * n);
        solve.resize(n);
        noise_diag.resize(n);
    }

    /// Fills scratch with sum_j p_j h_j h_j^H plus the per-antenna noise on
    /// the diagonal; noise_diag receives the diagonal entries.
    void assemble(const arma::vec& p, double thermal) {
        std::fill(scratch.begin(), scratch.end(), std::complex<double>{0.0, 0.0});
        for (unsigned j = 0; j < k; ++j) {
            if (p(j) == 0.0)
                continue;
            const std::complex<double>* src = outer[j].memptr();
            for (std::size_t idx = 0; idx < scratch.size(); ++idx)
                scratch[idx] += p(j) * src[idx];
        }
        if (uniform_rows) {
            const double noise = thermal + arma::dot(error_power, p);
            for (unsigned i = 0; i < n; ++i)
                noise_diag[i] = noise;
        } else {
            for (unsigned i = 0; i < n; ++i)
                noise_diag[i] = thermal + arma::dot(antenna_noise.row(i), p);
        }
        for (unsigned i = 0; i < n; ++i)
            scratch[static_cast<std::size_t>(i) * n + i] += noise_diag[i];
    }
};

double ul_objective(ObjectiveWorkspace& ws, double sigma_ul, const arma::vec& p) {
    // rate = log2 |Phi + H P H^H| - log2 |Phi| with the noise diagonal Phi.
    ws.assemble(p, sigma_ul);
    double log_num = 0.0;
    if (!chol_logdet(ws.scratch.data(), ws.n, log_num))
        return 0.0;
    double log_den = 0.0;
    for (unsigned i = 0; i < ws.n; ++i)
        log_den += std::log(ws.noise_diag[i]);
    return (log_num - log_den) / std::numbers::ln2;
}

double dl_objective(ObjectiveWorkspace& ws, const arma::cx_mat& h_eff, double sigma_dl,
                    const arma::vec& p) {
    ws.assemble(p, sigma_dl);
    double log_full = 0.0;
    if (!chol_logdet(ws.scratch.data(), ws.n, log_full))
        return 0.0;

    // Per-terminal log-det ratio via the matrix determinant lemma:
    // log |B| - log |B - p_j g_j g_j^H| = -log(1 - p_j g_j^H B^-1 g_j),
    // with g^H B^-1 g = ||L^-1 g||^2 from the Cholesky factor in scratch.
    const std::complex<double>* l = ws.scratch.data();
    std::complex<double>* y = ws.solve.data();
    const unsigned n = ws.n;
    double rate = 0.0;
    for (unsigned j = 0; j < ws.k; ++j) {
        if (p(j) == 0.0)
            continue;
        double q = 0.0;
        for (unsigned i = 0; i < n; ++i) {
            std::complex<double> v = h_eff(i, j);
            for (unsigned c = 0; c < i; ++c)
                v -= l[static_cast<std::size_t>(c) * n + i] * y[c];
            y[i] = v / l[static_cast<std::size_t>(i) * n + i].real();
            q += std::norm(y[i]);
        }
        const double rest = std::max(1.0 - p(j) * q, 1e-300);
        rate -= std::log(rest) / std::numbers::ln2;
    }
    return rate;
}

} // namespace

EffectiveUplink ul_effective_params(const arma::cx_mat& h_ul, double coeff_variance,
                                    double sigma_ul_bs) {
    if (sigma_ul_bs < 0.0 || !(coeff_variance > 0.0))
        throw std::invalid_argument("ul_effective_params: bad variance arguments");
    EffectiveUplink eff;
    eff.h_eff = h_ul / std::sqrt(1.0 + sigma_ul_bs / coeff_variance);
    const double e_bar =
        std::sqrt(coeff_variance * sigma_ul_bs / (coeff_variance + sigma_ul_bs));
    eff.e_bar = arma::mat(h_ul.n_rows, h_ul.n_cols, arma::fill::value(e_bar));
    return eff;
}

RateResult ul_sum_rate(const EffectiveUplink& eff, double sigma_ul, double p_max) {
    if (!(sigma_ul > 0.0) || p_max < 0.0)
        throw std::invalid_argument("ul_sum_rate: bad noise or power arguments");
    const arma::uword k = eff.h_eff.n_cols;

    ObjectiveWorkspace ws;
    ws.init(eff.h_eff, arma::square(eff.e_bar));

    arma::vec p(k, arma::fill::value(p_max));
    double best = ul_objective(ws, sigma_ul, p);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double before = best;
        for (arma::uword j = 0; j < k; ++j) {
            const auto slice = [&](double x) {
                arma::vec q = p;
                q(j) = x;
                return ul_objective(ws, sigma_ul, q);
            };
            const auto [x, fx] = golden_max(slice, 0.0, p_max);
            if (fx > best) {
                best = fx;
                p(j) = x;
            }
        }
        if (best - before < rate_tol)
            break;
    }
    return {std::max(best, 0.0), p};
}

EffectiveDownlink dl_effective_params(const arma::cx_mat& h_dl, double coeff_variance,
                                      double sigma_dl_ut, double sigma_dl_bs) {
    if (sigma_dl_ut < 0.0 || sigma_dl_bs < 0.0 || !(coeff_variance > 0.0))
        throw std::invalid_argument("dl_effective_params: bad variance arguments");
    const double e = coeff_variance;
    EffectiveDownlink eff;
    eff.h_eff = h_dl * std::sqrt(std::max(0.0, e - sigma_dl_bs) / (e + sigma_dl_ut));
    eff.e_ut = arma::vec(h_dl.n_cols,
                         arma::fill::value(std::sqrt(e * sigma_dl_ut / (e + sigma_dl_ut))));
    eff.e_bs = arma::vec(h_dl.n_cols,
                         arma::fill::value(std::sqrt(e * e * sigma_dl_bs / (e + sigma_dl_bs))));
    return eff;
}

RateResult dl_sum_rate(const EffectiveDownlink& eff, double sigma_dl, double p_tot) {
    if (!(sigma_dl > 0.0) || p_tot < 0.0)
        throw std::invalid_argument("dl_sum_rate: bad noise or power arguments");
    const arma::uword k = eff.h_eff.n_cols;

    if (arma::abs(eff.h_eff).max() == 0.0)
        return {0.0, arma::vec(k, arma::fill::zeros)};

    ObjectiveWorkspace ws;
    ws.init(eff.h_eff, arma::repmat((arma::square(eff.e_ut) + arma::square(eff.e_bs)).t(),
                                    eff.h_eff.n_rows, 1));

    // K+1 starts on the scaled simplex: uniform plus each vertex.
    std::vector<arma::vec> starts;
    starts.push_back(arma::vec(k, arma::fill::value(p_tot / k)));
    for (arma::uword j = 0; j < k; ++j) {
        arma::vec v(k, arma::fill::zeros);
        v(j) = p_tot;
        starts.push_back(v);
    }

    RateResult out;
    out.powers = starts.front();
    out.rate = -1.0;
    for (const arma::vec& start : starts) {
        arma::vec p = start;
        double best = dl_objective(ws, eff.h_eff, sigma_dl, p);
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            const double before = best;
            // Per-terminal moves within the remaining budget.
            for (arma::uword j = 0; j < k; ++j) {
                const double budget = p_tot - (arma::accu(p) - p(j));
                const auto slice = [&](double x) {
                    arma::vec q = p;
                    q(j) = x;
                    return dl_objective(ws, eff.h_eff, sigma_dl, q);
                };
                const auto [x, fx] = golden_max(slice, 0.0, std::max(budget, 0.0));
                if (fx > best) {
                    best = fx;
                    p(j) = x;
                }
            }
            // Pairwise transfers keep the sum fixed; without them the ascent
            // stalls on the simplex face once the budget binds.
            for (arma::uword a = 0; a + 1 < k; ++a)
                for (arma::uword b = a + 1; b < k; ++b) {
                    if (p(a) + p(b) == 0.0)
                        continue;
                    const auto slice = [&](double t) {
                        arma::vec q = p;
                        q(a) = p(a) + t;
                        q(b) = p(b) - t;
                        return dl_objective(ws, eff.h_eff, sigma_dl, q);
                    };
                    const auto [t, fx] = golden_max(slice, -p(a), p(b));
                    if (fx > best) {
                        best = fx;
                        p(a) += t;
                        p(b) -= t;
                    }
                }
            // Global rescale toward or away from the power budget.
            const double total = arma::accu(p);
            if (total > 0.0) {
                const auto slice = [&](double s) {
                    return dl_objective(ws, eff.h_eff, sigma_dl, arma::vec(s * p));
                };
                const auto [s, fx] = golden_max(slice, 0.0, p_tot / total);
                if (fx > best) {
                    best = fx;
                    p *= s;
                }
            }
            if (best - before < rate_tol)
                break;
        }
        if (best > out.rate) {
            out.rate = best;
            out.powers = p;
        }
    }
    out.rate = std::max(out.rate, 0.0);
    return out;
}

TdmEffective tdm_effective_params(const arma::cx_mat& h_dl, double coeff_variance,
                                  double sigma_dl_ut_tdm, double p_tot) {
    if (sigma_dl_ut_tdm < 0.0 || !(coeff_variance > 0.0) || p_tot < 0.0)
        throw std::invalid_argument("tdm_effective_params: bad arguments");
    const double e = coeff_variance;
    const arma::uword n = h_dl.n_rows;

    // Uninformed equal-gain beam; for isotropic channels any fixed unit-norm
    // beam has the same statistics as a random one.
    const arma::cx_vec beam(arma::vec(n, arma::fill::value(1.0 / std::sqrt(double(n)))),
                            arma::vec(n, arma::fill::zeros));
    TdmEffective eff;
    eff.h_eff = std::sqrt(p_tot * e / (e + sigma_dl_ut_tdm)) * (h_dl.t() * beam);
    eff.noise = arma::vec(h_dl.n_cols,
                          arma::fill::value(p_tot * e * sigma_dl_ut_tdm / (e + sigma_dl_ut_tdm)));
    return eff;
}

double tdm_sum_rate(const arma::cx_mat& h_dl, double coeff_variance,
                    double sigma_dl_ut_tdm, double sigma_dl, double p_tot) {
    if (!(sigma_dl > 0.0))
        throw std::invalid_argument("tdm_sum_rate: noise must be positive");
    const TdmEffective eff =
        tdm_effective_params(h_dl, coeff_variance, sigma_dl_ut_tdm, p_tot);
    const arma::uword k = h_dl.n_cols;
    double sum = 0.0;
    for (arma::uword j = 0; j < k; ++j)
        sum += std::log2(1.0 + std::norm(eff.h_eff(j)) / (eff.noise(j) + sigma_dl));
    return sum / static_cast<double>(k);
}

} // namespace csiregion::capacity
