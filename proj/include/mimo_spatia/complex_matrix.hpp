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

#ifndef MIMO_SPATIA_COMPLEX_MATRIX_HPP
#define MIMO_SPATIA_COMPLEX_MATRIX_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo_spatia
{

using cplx = std::complex<double>;

// Dense row-major complex matrix. Hermitian matrices use the same storage;
// builders fill the upper triangle and mirror it, so symmetry is exact.
class CMat
{
  public:
    CMat() : rows_(0), cols_(0) {}

    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols)
    {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("CMat: dimensions must be at least 1x1");
    }

    static CMat identity(std::size_t n)
    {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    cplx *data() { return a_.data(); }
    const cplx *data() const { return a_.data(); }
    cplx *row(std::size_t i) { return a_.data() + i * cols_; }
    const cplx *row(std::size_t i) const { return a_.data() + i * cols_; }

    cplx trace() const
    {
        require_square("trace");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const
    {
        double s = 0.0;
        for (const cplx &v : a_)
            s += std::norm(v);
        return std::sqrt(s);
    }

    CMat conj_transpose() const
    {
        CMat m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    // Maximum |A(i,j) - conj(A(j,i))| over all pairs; 0 for exactly Hermitian.
    double hermitian_defect() const
    {
        require_square("hermitian_defect");
        double d = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

    // Mirror the upper triangle (j >= i) onto the lower one, conjugated,
    // and force the diagonal real. Makes Hermitian symmetry exact.
    void hermitize_from_upper()
    {
        require_square("hermitize_from_upper");
        for (std::size_t i = 0; i < rows_; ++i)
        {
            (*this)(i, i) = cplx((*this)(i, i).real(), 0.0);
            for (std::size_t j = i + 1; j < cols_; ++j)
                (*this)(j, i) = std::conj((*this)(i, j));
        }
    }

    CMat &operator+=(const CMat &o)
    {
        require_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < a_.size(); ++k)
            a_[k] += o.a_[k];
        return *this;
    }

    CMat &operator-=(const CMat &o)
    {
        require_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < a_.size(); ++k)
            a_[k] -= o.a_[k];
        return *this;
    }

    CMat &operator*=(cplx s)
    {
        for (cplx &v : a_)
            v *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat &b) { return a += b; }
    friend CMat operator-(CMat a, const CMat &b) { return a -= b; }
    friend CMat operator*(cplx s, CMat a) { return a *= s; }

    bool operator==(const CMat &o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

  private:
    void require_square(const char *op) const
    {
        if (!is_square())
            throw std::invalid_argument(std::string("CMat::") + op + ": matrix must be square");
    }
    void require_same_shape(const CMat &o, const char *op) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("CMat::") + op + ": shape mismatch");
    }

    std::size_t rows_, cols_;
    std::vector<cplx> a_;
};

} // namespace mimo_spatia

#endif
