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
#include <complex>
#include <cstdint>
#include <random>

#include "csiregion/common.hpp"

namespace csiregion::numerics {

/// Zero-th order Bessel function of the first kind.
/// Absolute error below 1e-10 for |x| <= 1e3. Throws std::invalid_argument
/// on non-finite input.
double bessel_j0(double x);

/// si(x) = sin(x)/x with si(0) = 1.
double si(double x);

/// Result of a Hermitian eigendecomposition, eigenvalues sorted descending
/// (ties keep their first-occurrence order). Each eigenvector is rotated so
/// that its largest-magnitude component is real and nonnegative, which makes
/// decorrelation bases reproducible across runs.
struct EigenDecomposition {
    arma::vec eigenvalues;
    arma::cx_mat eigenvectors;
};

/// True when max_ij |A(i,j) - conj(A(j,i))| <= tol * max(1, max_ij |A(i,j)|).
bool is_hermitian(const arma::cx_mat& a, double tol = 1e-12);

/// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument if
/// the input is not square or not Hermitian within tolerance, NumericFailure
/// if the underlying solver does not converge.
EigenDecomposition hermitian_eig(const arma::cx_mat& a);

/// Solves A X = B for Hermitian A through the eigendecomposition kernel.
/// Throws NumericFailure when A is singular (an eigenvalue magnitude below
/// 1e-13 times the spectral norm).
arma::cx_mat herm_solve(const arma::cx_mat& a, const arma::cx_mat& b);

/// pinv(A) X for Hermitian PSD A: eigenvalues below rel_tol times the
/// spectral norm are treated as exactly zero. This is the continuous
/// sigma^2 -> 0 limit of (A + sigma^2 I)^-1 X on the range of A.
arma::cx_mat herm_pinv_solve(const arma::cx_mat& a, const arma::cx_mat& b,
                             double rel_tol = 1e-13);

/// Eigen-factorization of a Hermitian matrix that is PSD up to clipping:
/// eigenvalues in [-rel_tol * spectral_norm, 0) are clipped to zero. With
/// strict = true an eigenvalue below the clipping band throws
/// std::invalid_argument. `factor` satisfies A_clipped = factor * factor^H
/// and only spans the strictly positive eigendirections.
struct PsdFactor {
    arma::vec eigenvalues;   // clipped, descending
    arma::cx_mat eigenvectors;
    arma::cx_mat factor;
};
PsdFactor psd_factor(const arma::cx_mat& a, double rel_tol = 1e-10,
                     bool strict = false);

/// Symmetrizes and clips the negative eigenvalues of an almost-PSD Hermitian
/// matrix to zero (same clipping band as psd_factor).
arma::cx_mat clip_psd(const arma::cx_mat& a, double rel_tol = 1e-10,
                      bool strict = false);

/// Stateless seed derivation (splitmix64 based) so that independent streams
/// can be opened per realization index without coordination.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic Gaussian stream on top of std::mt19937_64. The Box-Muller
/// mapping is spelled out here instead of using std::normal_distribution,
/// whose output sequence is implementation-defined.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw on (0, 1].
    double next_uniform();

    /// Real standard normal N(0, 1).
    double next_normal();

    /// Circularly-symmetric complex normal CN(0, 1); real and imaginary
    /// parts are independent N(0, 1/2).
    std::complex<double> next_cnormal();

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws `count` zero-mean circularly-symmetric Gaussian vectors with
/// covariance cov (clipped PSD), one per column. Deterministic given seed.
/// Throws std::invalid_argument when cov is not square, not Hermitian, or
/// has an eigenvalue below the clipping band.
arma::cx_mat sample_correlated(const arma::cx_mat& cov, std::size_t count,
                               std::uint64_t seed);

} // namespace csiregion::numerics
