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

#include "csiregion/numerics.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace csiregion {

namespace log {

Level threshold() {
    static const Level cached = [] {
        const char* env = std::getenv("CSIREGION_LOG");
        if (env == nullptr)
            return Level::Warn;
        const std::string v(env);
        if (v == "error")
            return Level::Error;
        if (v == "warn")
            return Level::Warn;
        if (v == "info")
            return Level::Info;
        if (v == "debug")
            return Level::Debug;
        return Level::Warn;
    }();
    return cached;
}

void write(Level level, const std::string& msg) {
    if (level > threshold())
        return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[csiregion %s] %s\n", names[static_cast<int>(level)],
                 msg.c_str());
}

} // namespace log

namespace numerics {

double bessel_j0(double x) {
    if (!std::isfinite(x))
        throw std::invalid_argument("bessel_j0: non-finite argument");
    return boost::math::cyl_bessel_j(0, x);
}

double si(double x) {
    if (x == 0.0)
        return 1.0;
    return std::sin(x) / x;
}

bool is_hermitian(const arma::cx_mat& a, double tol) {
    if (a.n_rows != a.n_cols)
        return false;
    const double scale = std::max(1.0, arma::abs(a).max());
    return arma::abs(a - a.t()).max() <= tol * scale;
}

EigenDecomposition hermitian_eig(const arma::cx_mat& a) {
    if (a.is_empty() || a.n_rows != a.n_cols)
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    if (!is_hermitian(a))
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within tolerance");

    const arma::cx_mat h = 0.5 * (a + a.t());
    arma::vec values;
    arma::cx_mat vectors;
    if (!arma::eig_sym(values, vectors, h))
        throw NumericFailure("hermitian_eig: eigendecomposition did not converge");

    // LAPACK returns ascending order; flip to descending, stable on ties.
    const arma::uvec order = arma::stable_sort_index(values, "descend");
    EigenDecomposition out;
    out.eigenvalues = values(order);
    out.eigenvectors = vectors.cols(order);

    // Fix the global phase: largest-magnitude component real nonnegative.
    for (arma::uword j = 0; j < out.eigenvectors.n_cols; ++j) {
        arma::uword pivot = 0;
        double best = -1.0;
        for (arma::uword i = 0; i < out.eigenvectors.n_rows; ++i) {
            const double m = std::abs(out.eigenvectors(i, j));
            if (m > best) {
                best = m;
                pivot = i;
            }
        }
        if (best > 0.0) {
            const std::complex<double> c = out.eigenvectors(pivot, j);
            out.eigenvectors.col(j) *= std::conj(c) / std::abs(c);
            out.eigenvectors(pivot, j) = std::abs(out.eigenvectors(pivot, j));
        }
    }
    return out;
}

arma::cx_mat herm_solve(const arma::cx_mat& a, const arma::cx_mat& b) {
    const EigenDecomposition eig = hermitian_eig(a);
    const double spectral = arma::abs(eig.eigenvalues).max();
    if (spectral == 0.0 || arma::abs(eig.eigenvalues).min() <= 1e-13 * spectral)
        throw NumericFailure("herm_solve: matrix is singular to working precision");
    const arma::cx_vec inv = arma::conv_to<arma::cx_vec>::from(1.0 / eig.eigenvalues);
    return eig.eigenvectors * arma::diagmat(inv) * (eig.eigenvectors.t() * b);
}

arma::cx_mat herm_pinv_solve(const arma::cx_mat& a, const arma::cx_mat& b,
                             double rel_tol) {
    const EigenDecomposition eig = hermitian_eig(a);
    const double spectral = eig.eigenvalues.is_empty() ? 0.0 : arma::abs(eig.eigenvalues).max();
    arma::vec inv(eig.eigenvalues.n_elem, arma::fill::zeros);
    for (arma::uword i = 0; i < inv.n_elem; ++i)
        if (std::abs(eig.eigenvalues(i)) > rel_tol * spectral)
            inv(i) = 1.0 / eig.eigenvalues(i);
    return eig.eigenvectors * arma::diagmat(arma::conv_to<arma::cx_vec>::from(inv)) *
           (eig.eigenvectors.t() * b);
}

PsdFactor psd_factor(const arma::cx_mat& a, double rel_tol, bool strict) {
    EigenDecomposition eig = hermitian_eig(a);
    const double spectral = eig.eigenvalues.is_empty() ? 0.0 : arma::abs(eig.eigenvalues).max();
    const double floor = -rel_tol * spectral;
    if (strict && !eig.eigenvalues.is_empty() && eig.eigenvalues.min() < floor)
        throw std::invalid_argument("psd_factor: eigenvalue below the PSD clipping tolerance");

    PsdFactor out;
    // Eigenvalues inside the clipping band are numerical noise in both
    // directions; zero them so rank-deficient covariances sample cleanly.
    out.eigenvalues = eig.eigenvalues;
    for (auto& v : out.eigenvalues)
        if (v < rel_tol * spectral)
            v = 0.0;
    out.eigenvectors = eig.eigenvectors;

    const arma::uvec positive = arma::find(out.eigenvalues > 0.0);
    out.factor = out.eigenvectors.cols(positive);
    const arma::vec scale = arma::sqrt(out.eigenvalues(positive));
    for (arma::uword j = 0; j < positive.n_elem; ++j)
        out.factor.col(j) *= scale(j);
    return out;
}

arma::cx_mat clip_psd(const arma::cx_mat& a, double rel_tol, bool strict) {
    const EigenDecomposition eig = hermitian_eig(a);
    const double spectral = eig.eigenvalues.is_empty() ? 0.0 : arma::abs(eig.eigenvalues).max();
    if (strict && !eig.eigenvalues.is_empty() && eig.eigenvalues.min() < -rel_tol * spectral)
        throw std::invalid_argument("clip_psd: eigenvalue below the PSD clipping tolerance");
    if (eig.eigenvalues.is_empty() || eig.eigenvalues.min() >= 0.0)
        return 0.5 * (a + a.t());
    const arma::vec clipped = arma::clamp(eig.eigenvalues, 0.0, arma::datum::inf);
    return eig.eigenvectors * arma::diagmat(arma::conv_to<arma::cx_vec>::from(clipped)) *
           eig.eigenvectors.t();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x12F3C9E7D5A8B641ull));
}

double NormalStream::next_uniform() {
    // 53-bit mantissa draw mapped to (0, 1]; never returns zero so that
    // log(u) below stays finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * arma::datum::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::complex<double> NormalStream::next_cnormal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-std::log(u1));
    const double theta = 2.0 * arma::datum::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

arma::cx_mat sample_correlated(const arma::cx_mat& cov, std::size_t count,
                               std::uint64_t seed) {
    if (cov.n_rows != cov.n_cols)
        throw std::invalid_argument("sample_correlated: covariance must be square");
    const PsdFactor f = psd_factor(cov, 1e-10, true);

    const arma::uword dim = cov.n_rows;
    const arma::uword rank = f.factor.n_cols;
    if (rank == 0)
        return arma::cx_mat(dim, count, arma::fill::zeros);

    NormalStream stream(mix_seed(seed, 0));
    arma::cx_mat z(rank, count);
    for (arma::uword j = 0; j < count; ++j)
        for (arma::uword i = 0; i < rank; ++i)
            z(i, j) = stream.next_cnormal();
    return f.factor * z;
}

} // namespace numerics
} // namespace csiregion
