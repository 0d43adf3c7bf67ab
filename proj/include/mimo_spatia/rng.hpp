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
// Seeded random streams. std::mt19937_64 output is pinned by the standard,
// and the Gaussian transform below is hand-rolled (std::normal_distribution
// is implementation-defined), so identical seeds give bit-identical draws
// on every platform.

#ifndef MIMO_SPATIA_RNG_HPP
#define MIMO_SPATIA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "complex_matrix.hpp"

namespace mimo_spatia
{

namespace detail
{

inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Derives an independent stream seed from (master seed, domain tag, index).
// Used so that sweep points and Monte Carlo batches get decorrelated streams
// whose identity does not depend on execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain, std::uint64_t index)
{
    std::uint64_t s = master;
    std::uint64_t h = detail::splitmix64(s);
    s ^= domain * 0xD1342543DE82EF95ull;
    h ^= detail::splitmix64(s);
    s ^= index * 0xAF251AF3B0F025B5ull;
    h ^= detail::splitmix64(s);
    return h;
}

class RandomStream
{
  public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed), cached_(false), cache_(0.0) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method (pairs cached).
    double standard_normal()
    {
        if (cached_)
        {
            cached_ = false;
            return cache_;
        }
        double u, v, s;
        do
        {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cache_ = v * f;
        cached_ = true;
        return u * f;
    }

    // CN(0,1): unit total variance, 1/2 per real component.
    cplx standard_complex_gaussian()
    {
        const double re = standard_normal();
        const double im = standard_normal();
        return {re * 0.7071067811865476, im * 0.7071067811865476};
    }

  private:
    std::mt19937_64 gen_;
    bool cached_;
    double cache_;
};

} // namespace mimo_spatia

#endif
