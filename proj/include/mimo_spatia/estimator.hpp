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
// MMSE channel estimation under pilot sharing.
//
// All UEs in a PilotScenario reuse one pilot. With rho_p = 1 and each UE's
// beta carrying its effective SNR (beta = 10^{snr_dB/10}):
//
//   Q   = sum_l R_l + I          (observation covariance)
//   W   = R_t Q^{-1}             (MMSE filter for target t)
//   Psi = R_t Q^{-1} R_t         (estimate covariance)
//   C   = R_t - Psi              (error covariance)
//   NMSE = tr(C) / tr(R_t)
//
// The antenna-averaged correlation coefficient between the estimates of UEs
// a and b is the magnitude of
//   E{ghat_a^H ghat_b} / sqrt(E{||ghat_a||^2} E{||ghat_b||^2})
//    = tr(Q^{-1} R_a R_b) / sqrt(tr(Q^{-1} R_a^2) tr(Q^{-1} R_b^2)).
//
// Sweep-critical quantities avoid forming Psi: with Q = L L^H and
// S_x = L^{-1} R_x, tr(Q^{-1} R_a R_b) = <S_a, S_b>_F, so one Cholesky plus
// forward substitutions per scenario suffices.

#ifndef MIMO_SPATIA_ESTIMATOR_HPP
#define MIMO_SPATIA_ESTIMATOR_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "channel.hpp"
#include "covmodel.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mimo_spatia
{

struct UePrior
{
    CovarianceMatrix cov;
    double snr_eff_dB = 0.0; // effective SNR: rho_p * beta in dB, with rho_p = 1
};

struct PilotScenario
{
    std::vector<UePrior> ues;
    std::size_t target_index = 0;

    void validate() const
    {
        if (ues.empty())
            throw std::invalid_argument("PilotScenario: UE list must be non-empty");
        if (target_index >= ues.size())
            throw std::invalid_argument("PilotScenario: target_index out of range");
        const std::size_t M = ues.front().cov.R.rows();
        for (const UePrior &u : ues)
        {
            if (u.cov.R.rows() != M || u.cov.R.cols() != M)
                throw std::invalid_argument("PilotScenario: all covariances must share one dimension");
            const double beta_expected = std::pow(10.0, u.snr_eff_dB / 10.0);
            if (std::abs(u.cov.spec.beta - beta_expected) > 1e-9 * beta_expected)
                throw std::invalid_argument(
                    "PilotScenario: UE beta must equal 10^(snr_eff_dB/10) (rho_p = 1 convention)");
        }
    }
};

// Builds a UePrior with the scaling convention applied.
inline UePrior make_ue(CovarianceMatrix cov, double snr_eff_dB)
{
    UePrior u;
    u.cov = std::move(cov);
    u.snr_eff_dB = snr_eff_dB;
    return u;
}

struct EstimatorQuantities
{
    CMat Q;   // sum_l R_l + I
    CMat W;   // MMSE filter R_t Q^{-1}
    CMat Psi; // estimate covariance R_t Q^{-1} R_t
    CMat C;   // error covariance R_t - Psi
};

inline EstimatorQuantities build_quantities(const PilotScenario &s)
{
    s.validate();
    const std::size_t M = s.ues.front().cov.R.rows();
    EstimatorQuantities q;
    q.Q = CMat::identity(M);
    for (const UePrior &u : s.ues)
        q.Q += u.cov.R;
    q.Q.hermitize_from_upper();

    const CMat &R_t = s.ues[s.target_index].cov.R;
    // X = Q^{-1} R_t; W = R_t Q^{-1} = X^H because R_t and Q are Hermitian.
    const CMat X = hermitian_solve(q.Q, R_t);
    q.W = X.conj_transpose();
    q.Psi = matmul(q.W, R_t);
    q.Psi.hermitize_from_upper();
    q.C = R_t - q.Psi;
    q.C.hermitize_from_upper();
    return q;
}

// NMSE = tr(C)/tr(R_t), in [0, 1].
inline double nmse(const EstimatorQuantities &q, const CovarianceMatrix &R_target)
{
    const double tr_R = R_target.R.trace().real();
    if (!(tr_R > 0.0))
        throw std::invalid_argument("nmse: target covariance has non-positive trace");
    return q.C.trace().real() / tr_R;
}

// ------------------------------------------------------- trace fast path ---

// Reusable workspace for the closed-form sweep kernels (one per thread).
struct TraceWorkspace
{
    explicit TraceWorkspace(std::size_t M) : L(M, M), S(M, M), S2(M, M), Q(M, M) {}
    CMat L, S, S2, Q;
};

// Q := R_t + scale_i * R_i + I (two-UE scenario assembly without allocations).
inline void assemble_q(const CMat &R_t, const CMat &R_i, double scale_i, CMat &Q)
{
    const std::size_t M = R_t.rows();
    const cplx *a = R_t.data();
    const cplx *b = R_i.data();
    cplx *q = Q.data();
    for (std::size_t k = 0; k < M * M; ++k)
        q[k] = a[k] + scale_i * b[k];
    for (std::size_t m = 0; m < M; ++m)
        Q(m, m) += 1.0;
}

// Q := R_t + I (single-UE assembly).
inline void assemble_q(const CMat &R_t, CMat &Q)
{
    const std::size_t M = R_t.rows();
    const cplx *a = R_t.data();
    cplx *q = Q.data();
    for (std::size_t k = 0; k < M * M; ++k)
        q[k] = a[k];
    for (std::size_t m = 0; m < M; ++m)
        Q(m, m) += 1.0;
}

// Closed-form NMSE from Q and R_t via one Cholesky and one forward solve:
// NMSE = (tr R_t - ||L^{-1} R_t||_F^2) / tr R_t.
inline double nmse_trace_path(const CMat &R_t, const CMat &Q, TraceWorkspace &ws)
{
    cholesky_into(Q, ws.L);
    ws.S = R_t;
    forward_solve_inplace(ws.L, ws.S);
    const double tr_R = R_t.trace().real();
    const double tr_Psi = detail::sum_abs2(ws.S.rows() * ws.S.cols(), ws.S.data());
    return (tr_R - tr_Psi) / tr_R;
}

// Closed-form correlation coefficient between UEs a and b given Q.
inline double coefficient_trace_path(const CMat &R_a, const CMat &R_b, const CMat &Q,
                                     TraceWorkspace &ws)
{
    cholesky_into(Q, ws.L);
    ws.S = R_a;
    forward_solve_inplace(ws.L, ws.S);
    ws.S2 = R_b;
    forward_solve_inplace(ws.L, ws.S2);
    const std::size_t n = ws.S.rows() * ws.S.cols();
    const double na = detail::sum_abs2(n, ws.S.data());
    const double nb = detail::sum_abs2(n, ws.S2.data());
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::invalid_argument("correlation_coefficient: zero-trace estimate covariance");
    const cplx cross = detail::cdotc(n, ws.S.data(), ws.S2.data());
    return std::abs(cross) / std::sqrt(na * nb);
}

// Both metrics for a two-UE configuration with one Cholesky and two forward
// solves; the coefficient is invariant to the scaling of R_i, so callers may
// pass an unscaled interferer pattern as long as Q was assembled with the
// scaled one.
struct JointMetrics
{
    double nmse = 0.0;
    double coefficient = 0.0;
};

inline JointMetrics joint_trace_path(const CMat &R_t, const CMat &R_i, const CMat &Q,
                                     TraceWorkspace &ws)
{
    cholesky_into(Q, ws.L);
    ws.S = R_t;
    forward_solve_inplace(ws.L, ws.S);
    ws.S2 = R_i;
    forward_solve_inplace(ws.L, ws.S2);
    const std::size_t n = ws.S.rows() * ws.S.cols();
    const double nt = detail::sum_abs2(n, ws.S.data());
    const double ni = detail::sum_abs2(n, ws.S2.data());
    if (!(nt > 0.0) || !(ni > 0.0))
        throw std::invalid_argument("correlation_coefficient: zero-trace estimate covariance");
    const double tr_R = R_t.trace().real();
    const cplx cross = detail::cdotc(n, ws.S.data(), ws.S2.data());
    JointMetrics out;
    out.nmse = (tr_R - nt) / tr_R;
    out.coefficient = std::abs(cross) / std::sqrt(nt * ni);
    return out;
}

// Convenience wrappers over full scenarios (general UE count).

inline CMat scenario_q(const PilotScenario &s)
{
    s.validate();
    CMat Q = CMat::identity(s.ues.front().cov.R.rows());
    for (const UePrior &u : s.ues)
        Q += u.cov.R;
    Q.hermitize_from_upper();
    return Q;
}

inline double nmse_closed_form(const PilotScenario &s)
{
    const CMat Q = scenario_q(s);
    TraceWorkspace ws(Q.rows());
    return nmse_trace_path(s.ues[s.target_index].cov.R, Q, ws);
}

inline double correlation_coefficient(const PilotScenario &s, std::size_t a, std::size_t b)
{
    s.validate();
    if (a == b || a >= s.ues.size() || b >= s.ues.size())
        throw std::invalid_argument("correlation_coefficient: need two distinct UE indices");
    const CMat Q = scenario_q(s);
    TraceWorkspace ws(Q.rows());
    return coefficient_trace_path(s.ues[a].cov.R, s.ues[b].cov.R, Q, ws);
}

// ------------------------------------------------------ Monte Carlo path ---

// Per-trial channels and MMSE estimates for every UE in the scenario.
// Pilot sequences are never materialized: the de-spread observation
// y = sum_l g_l + n with n ~ CN(0, I) is the simulation entry point.
struct PilotPhaseSamples
{
    std::vector<CMat> truths;    // one M x n_trials matrix per UE
    std::vector<CMat> estimates; // one M x n_trials matrix per UE
};

inline PilotPhaseSamples simulate_pilot_phase(const PilotScenario &s, RandomStream &rng,
                                              std::size_t n_trials)
{
    s.validate();
    if (n_trials < 1)
        throw std::invalid_argument("simulate_pilot_phase: need at least one trial");
    const std::size_t M = s.ues.front().cov.R.rows();
    const std::size_t n_ue = s.ues.size();

    std::vector<CMat> factors;
    factors.reserve(n_ue);
    for (const UePrior &u : s.ues)
        factors.push_back(covariance_factor(u.cov));

    // Per-UE MMSE filters W_l = R_l Q^{-1}.
    const CMat Q = scenario_q(s);
    CMat L;
    cholesky_into(Q, L);
    std::vector<CMat> W;
    W.reserve(n_ue);
    for (const UePrior &u : s.ues)
    {
        CMat X = u.cov.R; // X := Q^{-1} R_l, then W_l = X^H
        forward_solve_inplace(L, X);
        adjoint_solve_inplace(L, X);
        W.push_back(X.conj_transpose());
    }

    PilotPhaseSamples out;
    out.truths.assign(n_ue, CMat(M, n_trials));
    out.estimates.assign(n_ue, CMat(M, n_trials));

    std::vector<cplx> z(M), y(M);
    for (std::size_t t = 0; t < n_trials; ++t)
    {
        std::fill(y.begin(), y.end(), cplx(0.0));
        for (std::size_t l = 0; l < n_ue; ++l)
        {
            for (std::size_t k = 0; k < M; ++k)
                z[k] = rng.standard_complex_gaussian();
            for (std::size_t i = 0; i < M; ++i)
            {
                const cplx g = detail::cdotu(M, factors[l].row(i), z.data());
                out.truths[l](i, t) = g;
                y[i] += g;
            }
        }
        for (std::size_t i = 0; i < M; ++i)
            y[i] += rng.standard_complex_gaussian(); // n ~ CN(0, I)
        for (std::size_t l = 0; l < n_ue; ++l)
            for (std::size_t i = 0; i < M; ++i)
                out.estimates[l](i, t) = detail::cdotu(M, W[l].row(i), y.data());
    }
    return out;
}

// Empirical NMSE of the target UE from simulated samples.
inline double empirical_nmse(const PilotPhaseSamples &samples, std::size_t target)
{
    const CMat &g = samples.truths.at(target);
    const CMat &ghat = samples.estimates.at(target);
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < g.rows() * g.cols(); ++k)
    {
        err += std::norm(g.data()[k] - ghat.data()[k]);
        ref += std::norm(g.data()[k]);
    }
    return err / ref;
}

// Max |entry| of the empirical cross-covariance E{ghat (g - ghat)^H} of the
// target UE — the orthogonality-principle check (0 in exact arithmetic).
inline double orthogonality_check(const PilotPhaseSamples &samples, std::size_t target)
{
    const CMat &g = samples.truths.at(target);
    const CMat &ghat = samples.estimates.at(target);
    const std::size_t M = g.rows();
    const std::size_t n = g.cols();
    if (n < 1)
        throw std::invalid_argument("orthogonality_check: empty sample set");

    CMat acc(M, M);
    std::vector<cplx> err(M);
    for (std::size_t t = 0; t < n; ++t)
    {
        for (std::size_t i = 0; i < M; ++i)
            err[i] = g(i, t) - ghat(i, t);
        for (std::size_t i = 0; i < M; ++i)
        {
            const cplx e = ghat(i, t);
            cplx *row = acc.row(i);
            for (std::size_t j = 0; j < M; ++j)
                row[j] += e * std::conj(err[j]);
        }
    }
    double mx = 0.0;
    for (std::size_t k = 0; k < M * M; ++k)
        mx = std::max(mx, std::abs(acc.data()[k]));
    return mx / static_cast<double>(n);
}

// Empirical covariance of the target's estimates (for the Psi cross-check).
inline CMat empirical_estimate_covariance(const PilotPhaseSamples &samples, std::size_t target)
{
    const CMat &ghat = samples.estimates.at(target);
    const std::size_t M = ghat.rows();
    const std::size_t n = ghat.cols();
    CMat acc(M, M);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < M; ++i)
        {
            const cplx e = ghat(i, t);
            cplx *row = acc.row(i);
            for (std::size_t j = 0; j < M; ++j)
                row[j] += e * std::conj(ghat(j, t));
        }
    acc *= cplx(1.0 / static_cast<double>(n));
    return acc;
}

// Empirical correlation coefficient between two UEs' estimates.
inline double empirical_correlation_coefficient(const PilotPhaseSamples &samples, std::size_t a,
                                                std::size_t b)
{
    const CMat &ga = samples.estimates.at(a);
    const CMat &gb = samples.estimates.at(b);
    const std::size_t n = ga.rows() * ga.cols();
    const cplx cross = detail::cdotc(n, gb.data(), ga.data()); // sum ghat_b conj(ghat_a) = E{ghat_a^H ghat_b}
    const double na = detail::sum_abs2(n, ga.data());
    const double nb = detail::sum_abs2(n, gb.data());
    return std::abs(cross) / std::sqrt(na * nb);
}

} // namespace mimo_spatia

#endif
