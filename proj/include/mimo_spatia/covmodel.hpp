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
// Covariance-matrix construction for the exponential spatial-correlation
// model with per-antenna log-normal gain variations:
//
//   ULA:  R(m,n) = beta * r^(n-m) * e^{i(n-m)theta} * 10^{(f_m+f_n)/20},  n >= m
//   UPA:  R = R_h(theta) (x) R_v(phi)   (Kronecker product of two ULA factors)
//
// The upper triangle is defined by the formula and mirrored conjugately.
// Implementation uses the congruence R = D * (beta*E) * D with
// E(m,n) = (r e^{i theta})^(n-m) and D = diag(10^{f_m/20}), which keeps the
// result positive semidefinite for every shadowing realization.

#ifndef MIMO_SPATIA_COVMODEL_HPP
#define MIMO_SPATIA_COVMODEL_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex_matrix.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mimo_spatia
{

enum class ArrayKind
{
    ula,
    upa,
    uncorrelated
};

inline const char *to_string(ArrayKind k)
{
    switch (k)
    {
    case ArrayKind::ula:
        return "ula";
    case ArrayKind::upa:
        return "upa";
    default:
        return "uncorrelated";
    }
}

struct CorrelationModelSpec
{
    ArrayKind kind = ArrayKind::ula;
    std::size_t M = 1;   // total antennas (UPA: M = M_h * M_v)
    std::size_t M_h = 1; // UPA horizontal size
    std::size_t M_v = 1; // UPA vertical size
    double r = 0.0;      // correlation factor in [0, 1]
    double theta = 0.0;  // azimuth AoA, radians in [-pi, pi)
    double phi = 0.0;    // elevation AoA, radians in [-pi/2, pi/2) (UPA only)
    double sigma_dB = 0.0;
    double beta = 1.0; // average large-scale fading coefficient (linear power)

    void validate() const
    {
        const double pi = std::numbers::pi;
        if (M < 1)
            throw std::invalid_argument("model.M: antenna count must be >= 1");
        if (kind == ArrayKind::upa)
        {
            if (M_h < 1 || M_v < 1)
                throw std::invalid_argument("model.M_h/model.M_v: UPA factors must be >= 1");
            if (M != M_h * M_v)
                throw std::invalid_argument("model.M: must equal M_h * M_v for a UPA");
            if (!(phi >= -pi / 2 && phi < pi / 2))
                throw std::invalid_argument("model.phi_deg: elevation must lie in [-90, 90)");
        }
        if (!(r >= 0.0 && r <= 1.0))
            throw std::invalid_argument("model.r: correlation factor must lie in [0, 1]");
        if (!(theta >= -pi && theta < pi))
            throw std::invalid_argument("model.theta_deg: azimuth must lie in [-180, 180)");
        if (!(sigma_dB >= 0.0))
            throw std::invalid_argument("model.sigma_dB: shadowing deviation must be >= 0");
        if (!(beta > 0.0))
            throw std::invalid_argument("model.beta: large-scale coefficient must be > 0");
    }
};

struct CovarianceMatrix
{
    CMat R;
    CorrelationModelSpec spec;
    // Per-antenna dB offsets actually applied. ULA: M entries. UPA: M_h
    // horizontal entries followed by M_v vertical entries. Empty when
    // sigma_dB = 0.
    std::vector<double> shadow_dB;
};

// i.i.d. Normal(0, sigma_dB^2) shadowing offsets; deterministic given stream.
inline std::vector<double> sample_shadowing(std::size_t M, double sigma_dB, RandomStream &rng)
{
    if (!(sigma_dB >= 0.0))
        throw std::invalid_argument("sample_shadowing: sigma_dB must be >= 0");
    std::vector<double> f(M, 0.0);
    if (sigma_dB > 0.0)
        for (double &v : f)
            v = sigma_dB * rng.standard_normal();
    return f;
}

// Exponential ULA covariance (upper triangle by the model, mirrored).
inline CovarianceMatrix exponential_ula(std::size_t M, double r, double theta, double beta,
                                        const std::vector<double> &f)
{
    CorrelationModelSpec spec;
    spec.kind = ArrayKind::ula;
    spec.M = M;
    spec.r = r;
    spec.theta = theta;
    spec.beta = beta;
    spec.validate();
    if (!f.empty() && f.size() != M)
        throw std::invalid_argument("exponential_ula: shadowing vector length must be M");

    // coef^d = r^d e^{i d theta} for lag d
    std::vector<cplx> lag(M);
    for (std::size_t d = 0; d < M; ++d)
        lag[d] = std::polar(std::pow(r, static_cast<double>(d)), theta * static_cast<double>(d));

    std::vector<double> amp(M, 1.0); // 10^{f_m/20}
    bool shadowed = false;
    for (std::size_t m = 0; m < f.size(); ++m)
        if (f[m] != 0.0)
            shadowed = true;
    if (shadowed)
        for (std::size_t m = 0; m < M; ++m)
            amp[m] = std::pow(10.0, f[m] / 20.0);

    CovarianceMatrix out;
    out.R = CMat(M, M);
    for (std::size_t m = 0; m < M; ++m)
    {
        cplx *row = out.R.row(m);
        const double bm = beta * amp[m];
        for (std::size_t n = m; n < M; ++n)
            row[n] = bm * amp[n] * lag[n - m];
    }
    out.R.hermitize_from_upper();
    out.spec = spec;
    if (shadowed)
        out.shadow_dB = f;
    return out;
}

// UPA covariance R = R_h (x) R_v; antenna m maps to
// (h, v) = (floor(m / M_v), m mod M_v). The beta factor rides on the
// horizontal factor; the vertical factor is unit power.
inline CovarianceMatrix upa_covariance(std::size_t M_h, std::size_t M_v, double r, double theta,
                                       double phi, double beta, const std::vector<double> &f_h,
                                       const std::vector<double> &f_v)
{
    CorrelationModelSpec spec;
    spec.kind = ArrayKind::upa;
    spec.M = M_h * M_v;
    spec.M_h = M_h;
    spec.M_v = M_v;
    spec.r = r;
    spec.theta = theta;
    spec.phi = phi;
    spec.beta = beta;
    spec.validate();

    const CovarianceMatrix Rh = exponential_ula(M_h, r, theta, beta, f_h);
    const CovarianceMatrix Rv = exponential_ula(M_v, r, phi, 1.0, f_v);

    CovarianceMatrix out;
    out.R = kron(Rh.R, Rv.R);
    out.R.hermitize_from_upper(); // keep the mirror bit-exact after the product
    out.spec = spec;
    if (!Rh.shadow_dB.empty() || !Rv.shadow_dB.empty())
    {
        out.shadow_dB.assign(M_h + M_v, 0.0);
        for (std::size_t i = 0; i < f_h.size(); ++i)
            out.shadow_dB[i] = f_h[i];
        for (std::size_t i = 0; i < f_v.size(); ++i)
            out.shadow_dB[M_h + i] = f_v[i];
    }
    return out;
}

// Uncorrelated Rayleigh reference: R = beta * I.
inline CovarianceMatrix uncorrelated_rayleigh(std::size_t M, double beta)
{
    CorrelationModelSpec spec;
    spec.kind = ArrayKind::uncorrelated;
    spec.M = M;
    spec.beta = beta;
    spec.validate();

    CovarianceMatrix out;
    out.R = CMat(M, M);
    for (std::size_t m = 0; m < M; ++m)
        out.R(m, m) = beta;
    out.spec = spec;
    return out;
}

// Builds a covariance from a declarative spec, drawing shadowing from rng.
inline CovarianceMatrix build_covariance(const CorrelationModelSpec &spec, RandomStream &rng)
{
    spec.validate();
    switch (spec.kind)
    {
    case ArrayKind::uncorrelated:
        return uncorrelated_rayleigh(spec.M, spec.beta);
    case ArrayKind::ula:
        return exponential_ula(spec.M, spec.r, spec.theta, spec.beta,
                               sample_shadowing(spec.M, spec.sigma_dB, rng));
    default: {
        const std::vector<double> f_h = sample_shadowing(spec.M_h, spec.sigma_dB, rng);
        const std::vector<double> f_v = sample_shadowing(spec.M_v, spec.sigma_dB, rng);
        return upa_covariance(spec.M_h, spec.M_v, spec.r, spec.theta, spec.phi, spec.beta, f_h, f_v);
    }
    }
}

// Eigenvalues sorted descending.
inline std::vector<double> eigen_spectrum(const CovarianceMatrix &cov)
{
    return hermitian_eig(cov.R).values;
}

namespace detail
{

// Hardening variance v = tr(R^2)/tr(R)^2 of an exponential-model factor,
// computed from the per-antenna powers p_m = beta * 10^{f_m/10} without
// forming the matrix:
//   tr(R^2) = sum_{m,n} p_m p_n r^{2|m-n|},   tr(R) = sum_m p_m.
inline double hardening_variance_powers(double r, const std::vector<double> &p)
{
    const std::size_t M = p.size();
    double tr = 0.0, num = 0.0;
    for (double v : p)
    {
        tr += v;
        num += v * v;
    }
    const double rr = r * r;
    double w = 1.0;
    for (std::size_t d = 1; d < M; ++d)
    {
        w *= rr;
        if (w < 1e-18)
            break; // remaining lags are below double precision relative to the d=0 term
        double s = 0.0;
        for (std::size_t m = 0; m + d < M; ++m)
            s += p[m] * p[m + d];
        num += 2.0 * w * s;
    }
    if (!(tr > 0.0))
        throw std::invalid_argument("hardening_variance: trace must be positive");
    return num / (tr * tr);
}

inline std::vector<double> powers_from_shadowing(double beta, std::size_t M, const double *f_dB)
{
    std::vector<double> p(M, beta);
    if (f_dB != nullptr)
        for (std::size_t m = 0; m < M; ++m)
            p[m] = beta * std::pow(10.0, f_dB[m] / 10.0);
    return p;
}

} // namespace detail

// v = tr(R^2)/tr(R)^2 in (0, 1]. For model-built covariances this uses the
// exact lag form above (ULA) and the Kronecker identity v(A (x) B) = v(A)v(B)
// (UPA); the generic fallback is the Frobenius identity tr(R^2) = ||R||_F^2,
// valid for Hermitian R. Never forms an explicit matrix square.
inline double hardening_variance(const CovarianceMatrix &cov)
{
    const CorrelationModelSpec &s = cov.spec;
    const double *f = cov.shadow_dB.empty() ? nullptr : cov.shadow_dB.data();
    switch (s.kind)
    {
    case ArrayKind::uncorrelated:
        return detail::hardening_variance_powers(0.0, detail::powers_from_shadowing(s.beta, s.M, f));
    case ArrayKind::ula:
        return detail::hardening_variance_powers(s.r, detail::powers_from_shadowing(s.beta, s.M, f));
    case ArrayKind::upa: {
        const double *fh = f;
        const double *fv = (f == nullptr) ? nullptr : f + s.M_h;
        const double vh =
            detail::hardening_variance_powers(s.r, detail::powers_from_shadowing(s.beta, s.M_h, fh));
        const double vv =
            detail::hardening_variance_powers(s.r, detail::powers_from_shadowing(1.0, s.M_v, fv));
        return vh * vv;
    }
    }
    return 0.0; // unreachable
}

// Generic Frobenius-identity path, exposed for cross-checking and for
// matrices not built by this module.
inline double hardening_variance_generic(const CMat &R)
{
    const double tr = R.trace().real();
    if (!(tr > 0.0))
        throw std::invalid_argument("hardening_variance: trace must be positive");
    const double fro = R.frobenius_norm();
    return (fro * fro) / (tr * tr);
}

} // namespace mimo_spatia

#endif
