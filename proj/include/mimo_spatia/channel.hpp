// SPDX-License-Identifier: Apache-2.0
//
// mimo-spatia — spatially correlated massive-MIMO covariance models and
// MMSE channel-estimation experiments
// Copyright (C) 2026 mimo-spatia contributors
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
//
// Correlated Rayleigh channel sampling g ~ CN(0, R) and empirical
// counterparts of the closed-form metrics.

#ifndef MIMO_SPATIA_CHANNEL_HPP
#define MIMO_SPATIA_CHANNEL_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "covmodel.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mimo_spatia
{

struct ChannelSampleSet
{
    CovarianceMatrix R_ref;
    CMat samples; // M x n_draws, one draw per column
    std::uint64_t seed = 0;
};

// Factor F with F F^H = R: Cholesky when positive definite, otherwise the
// eigen-based factor V diag(sqrt(max(lambda, 0))) for semidefinite matrices
// (r = 1 gives exactly rank one).
inline CMat covariance_factor(const CovarianceMatrix &cov)
{
    try
    {
        return cholesky(cov.R);
    }
    catch (const NotPositiveDefinite &)
    {
        const EigResult eig = hermitian_eig(cov.R);
        const std::size_t M = cov.R.rows();
        CMat F(M, M);
        for (std::size_t j = 0; j < M; ++j)
        {
            const double lam = eig.values[j];
            const double s = lam > 0.0 ? std::sqrt(lam) : 0.0;
            for (std::size_t i = 0; i < M; ++i)
                F(i, j) = s * eig.vectors(i, j);
        }
        return F;
    }
}

// Draws n i.i.d. channel realizations g = F z with z ~ CN(0, I).
// The draw order is column-by-column, antenna-by-antenna, so a given seed
// always produces the same sample set.
inline ChannelSampleSet sample_channels(const CovarianceMatrix &cov, std::size_t n, RandomStream &rng,
                                        std::uint64_t seed_tag = 0)
{
    if (n < 1)
        throw std::invalid_argument("sample_channels: need at least one draw");
    const std::size_t M = cov.R.rows();
    const CMat F = covariance_factor(cov);

    ChannelSampleSet out;
    out.R_ref = cov;
    out.samples = CMat(M, n);
    out.seed = seed_tag;

    std::vector<cplx> z(M);
    for (std::size_t j = 0; j < n; ++j)
    {
        for (std::size_t k = 0; k < M; ++k)
            z[k] = rng.standard_complex_gaussian();
        // samples(:,j) = F z ; F is lower triangular on the Cholesky path but
        // the product is taken dense so the eigen-fallback path is identical.
        for (std::size_t i = 0; i < M; ++i)
            out.samples(i, j) = detail::cdotu(M, F.row(i), z.data());
    }
    return out;
}

// Sample variance of ||g||^2 normalized by its squared sample mean — the
// empirical counterpart of v = tr(R^2)/tr(R)^2.
inline double empirical_hardening(const ChannelSampleSet &set)
{
    const std::size_t n = set.samples.cols();
    if (n < 2)
        throw std::invalid_argument("empirical_hardening: need at least two draws");
    const std::size_t M = set.samples.rows();

    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            s += std::norm(set.samples(i, j));
        e[j] = s;
    }
    double mean = 0.0;
    for (double v : e)
        mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : e)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    return var / (mean * mean);
}

} // namespace mimo_spatia

#endif
