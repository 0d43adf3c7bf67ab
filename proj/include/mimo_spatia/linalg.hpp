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
// Dense complex linear algebra: Hermitian eigendecomposition (cyclic Jacobi),
// Cholesky factorization, triangular solves, Kronecker products and trace
// helpers. All functions are pure; no shared mutable state.

#ifndef MIMO_SPATIA_LINALG_HPP
#define MIMO_SPATIA_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex_matrix.hpp"

namespace mimo_spatia
{

class NotPositiveDefinite : public std::runtime_error
{
  public:
    NotPositiveDefinite(std::size_t pivot_index, double pivot_value)
        : std::runtime_error("cholesky: pivot " + std::to_string(pivot_index) +
                             " is not positive (value " + std::to_string(pivot_value) + ")"),
          pivot_index(pivot_index), pivot_value(pivot_value)
    {
    }
    std::size_t pivot_index;
    double pivot_value;
};

class EigenFailure : public std::runtime_error
{
  public:
    explicit EigenFailure(double off_residual)
        : std::runtime_error("hermitian_eig: no convergence after sweep cap, off-diagonal residual " +
                             std::to_string(off_residual)),
          off_residual(off_residual)
    {
    }
    double off_residual;
};

namespace detail
{

// Hot kernels operate on interleaved (re,im) doubles so the compiler can
// vectorize them; std::complex guarantees this layout.

// y -= a * x over n complex entries.
inline void caxpy_sub(std::size_t n, const cplx a, const cplx *x, cplx *y)
{
    const double ar = a.real(), ai = a.imag();
    const double *xp = reinterpret_cast<const double *>(x);
    double *yp = reinterpret_cast<double *>(y);
    for (std::size_t k = 0; k < 2 * n; k += 2)
    {
        const double xr = xp[k], xi = xp[k + 1];
        yp[k] -= ar * xr - ai * xi;
        yp[k + 1] -= ar * xi + ai * xr;
    }
}

// y += a * x over n complex entries.
inline void caxpy_add(std::size_t n, const cplx a, const cplx *x, cplx *y)
{
    const double ar = a.real(), ai = a.imag();
    const double *xp = reinterpret_cast<const double *>(x);
    double *yp = reinterpret_cast<double *>(y);
    for (std::size_t k = 0; k < 2 * n; k += 2)
    {
        const double xr = xp[k], xi = xp[k + 1];
        yp[k] += ar * xr - ai * xi;
        yp[k + 1] += ar * xi + ai * xr;
    }
}

// sum_k x[k] * conj(y[k]) over n complex entries.
inline cplx cdotc(std::size_t n, const cplx *x, const cplx *y)
{
    const double *xp = reinterpret_cast<const double *>(x);
    const double *yp = reinterpret_cast<const double *>(y);
    double sr = 0.0, si = 0.0;
    for (std::size_t k = 0; k < 2 * n; k += 2)
    {
        const double xr = xp[k], xi = xp[k + 1];
        const double yr = yp[k], yi = yp[k + 1];
        sr += xr * yr + xi * yi;
        si += xi * yr - xr * yi;
    }
    return {sr, si};
}

// sum_k x[k] * y[k] (no conjugation) over n complex entries.
inline cplx cdotu(std::size_t n, const cplx *x, const cplx *y)
{
    const double *xp = reinterpret_cast<const double *>(x);
    const double *yp = reinterpret_cast<const double *>(y);
    double sr = 0.0, si = 0.0;
    for (std::size_t k = 0; k < 2 * n; k += 2)
    {
        const double xr = xp[k], xi = xp[k + 1];
        const double yr = yp[k], yi = yp[k + 1];
        sr += xr * yr - xi * yi;
        si += xr * yi + xi * yr;
    }
    return {sr, si};
}

// sum_k |x[k]|^2 over n complex entries.
inline double sum_abs2(std::size_t n, const cplx *x)
{
    const double *xp = reinterpret_cast<const double *>(x);
    double s = 0.0;
    for (std::size_t k = 0; k < 2 * n; ++k)
        s += xp[k] * xp[k];
    return s;
}

// row scale: x *= a (real scalar).
inline void rscale(std::size_t n, double a, cplx *x)
{
    double *xp = reinterpret_cast<double *>(x);
    for (std::size_t k = 0; k < 2 * n; ++k)
        xp[k] *= a;
}

} // namespace detail

// ------------------------------------------------------------- Cholesky ---

// Lower-triangular Cholesky factor of a Hermitian positive definite A,
// written into pre-sized L (may alias nothing). A = L L^H.
// Throws NotPositiveDefinite when a pivot falls at or below
// tol_pd = 1e-12 * max diagonal.
inline void cholesky_into(const CMat &A, CMat &L)
{
    if (!A.is_square())
        throw std::invalid_argument("cholesky: matrix must be square");
    const std::size_t n = A.rows();
    if (L.rows() != n || L.cols() != n)
        L = CMat(n, n);

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_diag = std::max(max_diag, A(i, i).real());
    const double tol_pd = 1e-12 * max_diag;

    for (std::size_t i = 0; i < n; ++i)
    {
        cplx *Li = L.row(i);
        for (std::size_t j = 0; j < i; ++j)
        {
            const cplx s = A(i, j) - detail::cdotc(j, Li, L.row(j));
            Li[j] = s * (1.0 / L(j, j).real());
        }
        const double d = A(i, i).real() - detail::sum_abs2(i, Li);
        if (!(d > tol_pd))
            throw NotPositiveDefinite(i, d);
        Li[i] = std::sqrt(d);
        for (std::size_t j = i + 1; j < n; ++j)
            Li[j] = 0.0;
    }
}

inline CMat cholesky(const CMat &A)
{
    CMat L;
    cholesky_into(A, L);
    return L;
}

// B := L^{-1} B (forward substitution, L lower triangular with real diagonal).
inline void forward_solve_inplace(const CMat &L, CMat &B)
{
    const std::size_t n = L.rows();
    if (B.rows() != n)
        throw std::invalid_argument("forward_solve: dimension mismatch");
    const std::size_t m = B.cols();
    for (std::size_t i = 0; i < n; ++i)
    {
        const cplx *Li = L.row(i);
        cplx *Bi = B.row(i);
        for (std::size_t k = 0; k < i; ++k)
            detail::caxpy_sub(m, Li[k], B.row(k), Bi);
        detail::rscale(m, 1.0 / Li[i].real(), Bi);
    }
}

// B := L^{-H} B (back substitution with the adjoint factor).
inline void adjoint_solve_inplace(const CMat &L, CMat &B)
{
    const std::size_t n = L.rows();
    if (B.rows() != n)
        throw std::invalid_argument("adjoint_solve: dimension mismatch");
    const std::size_t m = B.cols();
    for (std::size_t k = n; k-- > 0;)
    {
        const cplx *Lk = L.row(k);
        cplx *Bk = B.row(k);
        detail::rscale(m, 1.0 / Lk[k].real(), Bk);
        for (std::size_t i = 0; i < k; ++i)
            detail::caxpy_sub(m, std::conj(Lk[i]), Bk, B.row(i));
    }
}

// Solve A X = B for Hermitian positive definite A. Never forms A^{-1}.
inline CMat hermitian_solve(const CMat &A, const CMat &B)
{
    if (A.rows() != B.rows())
        throw std::invalid_argument("hermitian_solve: dimension mismatch");
    CMat L;
    cholesky_into(A, L);
    CMat X = B;
    forward_solve_inplace(L, X);
    adjoint_solve_inplace(L, X);
    return X;
}

// ------------------------------------------------------ products, traces ---

inline CMat matmul(const CMat &A, const CMat &B)
{
    if (A.cols() != B.rows())
        throw std::invalid_argument("matmul: dimension mismatch");
    CMat C(A.rows(), B.cols());
    const std::size_t m = B.cols();
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
        cplx *Ci = C.row(i);
        for (std::size_t k = 0; k < A.cols(); ++k)
            detail::caxpy_add(m, A(i, k), B.row(k), Ci);
    }
    return C;
}

inline CMat kron(const CMat &A, const CMat &B)
{
    CMat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
        {
            const cplx a = A(i, j);
            for (std::size_t p = 0; p < B.rows(); ++p)
            {
                cplx *Kr = K.row(i * B.rows() + p) + j * B.cols();
                const cplx *Br = B.row(p);
                for (std::size_t q = 0; q < B.cols(); ++q)
                    Kr[q] = a * Br[q];
            }
        }
    return K;
}

// tr(A B) for arbitrary square A, B of equal dimension.
inline cplx trace_product(const CMat &A, const CMat &B)
{
    if (A.rows() != B.rows() || !A.is_square() || !B.is_square())
        throw std::invalid_argument("trace_product: need equal square matrices");
    cplx t = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            t += A(i, j) * B(j, i);
    return t;
}

// sum_{ij} A(i,j) * conj(B(i,j)) = tr(A B^H); contiguous in both operands.
inline cplx frobenius_inner(const CMat &A, const CMat &B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("frobenius_inner: shape mismatch");
    return detail::cdotc(A.rows() * A.cols(), A.data(), B.data());
}

// ------------------------------------------------- Hermitian eigensolver ---

struct EigResult
{
    std::vector<double> values; // sorted descending
    CMat vectors;               // orthonormal columns, A = V diag(values) V^H
};

// Cyclic Jacobi for Hermitian matrices. Sweep cap 100; convergence when the
// off-diagonal Frobenius norm falls below 1e-12 * ||A||_F.
inline EigResult hermitian_eig(const CMat &A_in)
{
    if (!A_in.is_square())
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    const std::size_t n = A_in.rows();

    CMat A = A_in;
    A.hermitize_from_upper(); // enforce exact symmetry on the working copy
    CMat V = CMat::identity(n);

    const double norm_A = A.frobenius_norm();
    const double thresh = 1e-12 * norm_A;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                s += 2.0 * std::norm(A(i, j));
        return std::sqrt(s);
    };

    constexpr int sweep_cap = 100;
    double off = off_norm();
    for (int sweep = 0; sweep < sweep_cap && off > thresh; ++sweep)
    {
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const cplx b = A(p, q);
                const double babs = std::abs(b);
                if (babs < 1e-300)
                {
                    A(p, q) = A(q, p) = 0.0;
                    continue;
                }
                const cplx u = b / babs; // off-diagonal phase
                const double app = A(p, p).real();
                const double aqq = A(q, q).real();
                const double tau = (aqq - app) / (2.0 * babs);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx su = s * u;
                const cplx su_conj = s * std::conj(u);

                // A <- J^H A J with J the identity except
                // J(p,p)=c, J(p,q)=s*u, J(q,p)=-s*conj(u), J(q,q)=c.
                for (std::size_t k = 0; k < n; ++k)
                {
                    if (k == p || k == q)
                        continue;
                    const cplx akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - su_conj * akq;
                    A(k, q) = su * akp + c * akq;
                    A(p, k) = std::conj(A(k, p));
                    A(q, k) = std::conj(A(k, q));
                }
                A(p, p) = app - t * babs;
                A(q, q) = aqq + t * babs;
                A(p, q) = A(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k)
                {
                    const cplx vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - su_conj * vkq;
                    V(k, q) = su * vkp + c * vkq;
                }
            }
        off = off_norm();
    }
    if (off > thresh)
        throw EigenFailure(off);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return A(a, a).real() > A(b, b).real(); });

    EigResult out;
    out.values.resize(n);
    out.vectors = CMat(n, n);
    for (std::size_t j = 0; j < n; ++j)
    {
        out.values[j] = A(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, j) = V(i, order[j]);
    }
    return out;
}

} // namespace mimo_spatia

#endif
