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
// Experiment engines. Each engine maps a validated ExperimentConfig to one
// ResultTable. Determinism contract: every Monte Carlo point derives its
// own seed from (master_seed, domain, point index) and results are stored
// by point index before a sequential reduction, so output bytes do not
// depend on the number of worker threads.

#ifndef MIMO_SPATIA_SCENARIOS_HPP
#define MIMO_SPATIA_SCENARIOS_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "covmodel.hpp"
#include "csv.hpp"
#include "estimator.hpp"
#include "version.hpp"

namespace mimo_spatia
{

inline std::size_t resolve_threads(int requested)
{
    if (requested > 0)
        return static_cast<std::size_t>(requested);
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

namespace seed_domain
{
// Disjoint high-byte tags; the low bits carry a series index.
inline constexpr std::uint64_t spectrum = 0x0100000000000000ull;
inline constexpr std::uint64_t hardening = 0x0200000000000000ull;
inline constexpr std::uint64_t nmse = 0x0300000000000000ull;
inline constexpr std::uint64_t snr = 0x0400000000000000ull;
inline constexpr std::uint64_t contamination = 0x0500000000000000ull;
inline constexpr std::uint64_t table_rows = 0x0600000000000000ull;
inline constexpr std::uint64_t table_hardening = 0x0700000000000000ull;
} // namespace seed_domain

namespace detail
{

// Runs fn(workspace, i) for i in [0, n) on `threads` workers. Each worker
// owns one workspace from make(). Work items must write results into
// per-index slots; no cross-item ordering is guaranteed.
template <typename MakeWs, typename Fn>
inline void parallel_for_ws(std::size_t n, std::size_t threads, MakeWs make, Fn fn)
{
    if (n == 0)
        return;
    if (threads > n)
        threads = n;
    if (threads <= 1)
    {
        auto ws = make();
        for (std::size_t i = 0; i < n; ++i)
            fn(ws, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&]() {
        try
        {
            auto ws = make();
            for (;;)
            {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n)
                    break;
                fn(ws, i);
            }
        }
        catch (...)
        {
            const std::lock_guard<std::mutex> lock(err_mutex);
            if (!err)
                err = std::current_exception();
            next.store(n, std::memory_order_relaxed); // stop remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (std::thread &t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

inline double deg2rad(double deg) { return deg / 180.0 * std::numbers::pi; }

inline std::string fmt_short(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// One (array, r, sigma) curve within a sweep.
struct Series
{
    ArrayKind kind;
    double r;
    double sigma;
};

inline std::string series_tag(const Series &s)
{
    if (s.kind == ArrayKind::uncorrelated)
        return "uncorrelated";
    return std::string(to_string(s.kind)) + "_r" + fmt_short(s.r) + "_s" + fmt_short(s.sigma);
}

// Cross product of arrays x r x sigma; the uncorrelated array ignores both
// parameters and contributes a single series.
inline std::vector<Series> enumerate_series(const std::vector<ArrayKind> &arrays,
                                            const std::vector<double> &rs,
                                            const std::vector<double> &sigmas)
{
    std::vector<Series> out;
    bool have_uncorrelated = false;
    for (ArrayKind k : arrays)
    {
        if (k == ArrayKind::uncorrelated)
        {
            if (!have_uncorrelated)
                out.push_back({k, 0.0, 0.0});
            have_uncorrelated = true;
            continue;
        }
        for (double r : rs)
            for (double s : sigmas)
                out.push_back({k, r, s});
    }
    if (out.empty())
        throw std::invalid_argument("model.arrays: no series to run");
    return out;
}

// Lazily sized per-thread workspace for the trace paths.
struct TraceWsCache
{
    std::size_t M = 0;
    std::optional<TraceWorkspace> ws;
    TraceWorkspace &get(std::size_t m)
    {
        if (!ws || M != m)
        {
            ws.emplace(m);
            M = m;
        }
        return *ws;
    }
};

} // namespace detail

// UPA dimensions for the configured M; rejects non-square M unless explicit
// factors were given.
inline std::pair<std::size_t, std::size_t> upa_dims_checked(const ExperimentConfig &c)
{
    const std::size_t h = c.upa_h();
    const std::size_t v = c.upa_v();
    if (h * v != c.M)
        throw std::invalid_argument(
            "model.M: UPA series need a square antenna count or explicit model.M_h/model.M_v");
    return {h, v};
}

// Model spec for one series point. M_override (sweeps over M) snaps UPA
// counts to the nearest square.
inline CorrelationModelSpec model_for(const ExperimentConfig &c, ArrayKind kind, double r,
                                      double sigma, double beta, std::size_t M_override = 0)
{
    CorrelationModelSpec m;
    m.kind = kind;
    m.r = r;
    m.sigma_dB = sigma;
    m.beta = beta;
    m.theta = detail::deg2rad(c.theta_deg);
    m.phi = detail::deg2rad(c.phi_deg);
    if (kind == ArrayKind::upa)
    {
        if (M_override != 0)
        {
            const std::size_t side = ExperimentConfig::nearest_square_side(M_override);
            m.M_h = m.M_v = side;
            m.M = side * side;
        }
        else
        {
            const auto dims = upa_dims_checked(c);
            m.M_h = dims.first;
            m.M_v = dims.second;
            m.M = c.M;
        }
    }
    else
    {
        m.M = M_override != 0 ? M_override : c.M;
        m.M_h = m.M_v = 1;
    }
    return m;
}

// Deterministic '#'-header lines: version plus the resolved config. The
// threads line is omitted because thread count never affects results.
inline std::vector<std::string> config_provenance(const ExperimentConfig &c)
{
    std::vector<std::string> p;
    p.push_back(std::string("mimo-spatia ") + version_string);
    p.push_back("config:");
    std::istringstream is(serialize_config(c));
    for (std::string line; std::getline(is, line);)
        if (line.rfind("threads = ", 0) != 0)
            p.push_back("  " + line);
    return p;
}

// First antenna count where the variance grid falls to `level`, log-log
// interpolated between the bracketing grid points. Exact grid hits are
// returned exactly; NaN when the level is never reached.
inline double interpolate_threshold(const std::vector<double> &Ms, const std::vector<double> &vs,
                                    double level)
{
    if (Ms.size() != vs.size() || Ms.empty())
        throw std::invalid_argument("interpolate_threshold: grids must match and be non-empty");
    if (!(level > 0.0))
        throw std::invalid_argument("interpolate_threshold: level must be > 0");
    for (std::size_t i = 0; i < vs.size(); ++i)
    {
        if (!(vs[i] > 0.0) || !(Ms[i] > 0.0))
            throw std::invalid_argument("interpolate_threshold: grids must be positive");
        if (vs[i] <= level)
        {
            if (vs[i] == level || i == 0)
                return Ms[i];
            const double x0 = std::log(Ms[i - 1]);
            const double x1 = std::log(Ms[i]);
            const double y0 = std::log(vs[i - 1]);
            const double y1 = std::log(vs[i]);
            return std::exp(x0 + (std::log(level) - y0) * (x1 - x0) / (y1 - y0));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// One hardening-variance draw without materializing the covariance matrix.
inline double hardening_variance_draw(ArrayKind kind, std::size_t M, std::size_t M_h,
                                      std::size_t M_v, double r, double beta, double sigma,
                                      RandomStream &rng)
{
    switch (kind)
    {
    case ArrayKind::uncorrelated:
    {
        const std::vector<double> p = detail::powers_from_shadowing(beta, M, nullptr);
        return detail::hardening_variance_powers(0.0, p);
    }
    case ArrayKind::ula:
    {
        std::vector<double> f;
        const double *fp = nullptr;
        if (sigma > 0.0)
        {
            f = sample_shadowing(M, sigma, rng);
            fp = f.data();
        }
        const std::vector<double> p = detail::powers_from_shadowing(beta, M, fp);
        return detail::hardening_variance_powers(r, p);
    }
    default:
    {
        std::vector<double> f_h, f_v;
        const double *fhp = nullptr;
        const double *fvp = nullptr;
        if (sigma > 0.0)
        {
            f_h = sample_shadowing(M_h, sigma, rng);
            f_v = sample_shadowing(M_v, sigma, rng);
            fhp = f_h.data();
            fvp = f_v.data();
        }
        const std::vector<double> p_h = detail::powers_from_shadowing(beta, M_h, fhp);
        const std::vector<double> p_v = detail::powers_from_shadowing(1.0, M_v, fvp);
        return detail::hardening_variance_powers(r, p_h) * detail::hardening_variance_powers(r, p_v);
    }
    }
}

// The canonical antenna-count grid for hardening sweeps: perfect squares so
// ULA and UPA series share rows.
inline const std::vector<std::size_t> &default_hardening_grid()
{
    static const std::vector<std::size_t> grid = {9,   16,  25,  36,  49,  64,  81,  100, 144,
                                                  196, 256, 324, 400, 484, 576, 676, 784, 900};
    return grid;
}

struct HardeningGrid
{
    std::vector<double> M; // antenna counts actually used (UPA snaps to squares)
    std::vector<double> v; // Monte Carlo mean variance at each count
};

inline HardeningGrid compute_hardening_grid(ArrayKind kind, const std::vector<std::size_t> &Ms,
                                            double r, double sigma, double beta,
                                            std::size_t draws, std::uint64_t master,
                                            std::uint64_t domain, std::size_t threads)
{
    HardeningGrid g;
    g.M.resize(Ms.size());
    g.v.resize(Ms.size());
    detail::parallel_for_ws(
        Ms.size(), threads, [] { return 0; },
        [&](int &, std::size_t i) {
            std::size_t M = Ms[i];
            std::size_t M_h = 1, M_v = 1;
            if (kind == ArrayKind::upa)
            {
                const std::size_t side = ExperimentConfig::nearest_square_side(M);
                M_h = M_v = side;
                M = side * side;
            }
            const std::size_t n =
                (kind != ArrayKind::uncorrelated && sigma > 0.0) ? draws : std::size_t{1};
            RandomStream rng(derive_seed(master, domain, i));
            double acc = 0.0;
            for (std::size_t d = 0; d < n; ++d)
                acc += hardening_variance_draw(kind, M, M_h, M_v, r, beta, sigma, rng);
            g.M[i] = static_cast<double>(M);
            g.v[i] = acc / static_cast<double>(n);
        });
    return g;
}

// ------------------------------------------------------- experiment: eig ---

// Eigenvalue spectra (descending, Monte Carlo mean over shadowing draws),
// one column per (array, r, sigma) series.
inline ResultTable run_spectrum(const ExperimentConfig &c)
{
    const std::vector<detail::Series> series =
        detail::enumerate_series(c.arrays, c.r_values, c.sigma_values_dB);
    for (const detail::Series &s : series)
        if (s.kind == ArrayKind::upa)
            upa_dims_checked(c);

    struct Task
    {
        std::size_t series, draw;
    };
    std::vector<Task> tasks;
    std::vector<std::size_t> first_task(series.size()), n_draws(series.size());
    for (std::size_t si = 0; si < series.size(); ++si)
    {
        const bool mc = series[si].kind != ArrayKind::uncorrelated && series[si].sigma > 0.0;
        n_draws[si] = mc ? c.shadowing_draws : 1;
        first_task[si] = tasks.size();
        for (std::size_t d = 0; d < n_draws[si]; ++d)
            tasks.push_back({si, d});
    }

    std::vector<std::vector<double>> spectra(tasks.size());
    detail::parallel_for_ws(
        tasks.size(), resolve_threads(c.threads), [] { return 0; },
        [&](int &, std::size_t i) {
            const Task t = tasks[i];
            const detail::Series &s = series[t.series];
            RandomStream rng(derive_seed(c.master_seed, seed_domain::spectrum | t.series, t.draw));
            const CorrelationModelSpec m = model_for(c, s.kind, s.r, s.sigma, c.beta);
            const CovarianceMatrix cov = build_covariance(m, rng);
            spectra[i] = eigen_spectrum(cov);
        });

    ResultTable t;
    t.name = c.output_prefix;
    t.provenance = config_provenance(c);
    t.columns.push_back("antenna_index");
    for (const detail::Series &s : series)
        t.columns.push_back("eig_" + detail::series_tag(s));
    t.rows.assign(c.M, std::vector<double>(t.columns.size(), 0.0));
    for (std::size_t i = 0; i < c.M; ++i)
        t.rows[i][0] = static_cast<double>(i + 1);
    for (std::size_t si = 0; si < series.size(); ++si)
        for (std::size_t i = 0; i < c.M; ++i)
        {
            double acc = 0.0;
            for (std::size_t d = 0; d < n_draws[si]; ++d)
                acc += spectra[first_task[si] + d][i];
            t.rows[i][si + 1] = acc / static_cast<double>(n_draws[si]);
        }
    return t;
}

// ------------------------------------------- experiment: hardening sweep ---

// Channel-hardening variance versus antenna count, long format (one row per
// series x count). Thresholds against the uncorrelated level at M = model.M
// are reported in the provenance header.
inline ResultTable run_hardening_sweep(const ExperimentConfig &c)
{
    const std::vector<detail::Series> series =
        detail::enumerate_series(c.arrays, c.r_values, c.sigma_values_dB);
    const std::size_t threads = resolve_threads(c.threads);
    const double level = 1.0 / static_cast<double>(c.M);

    ResultTable t;
    t.name = c.output_prefix;
    t.label_column = "series";
    t.columns = {"M", "variance"};
    t.provenance = config_provenance(c);
    t.provenance.push_back("threshold level = " + detail::csv_number(level) +
                           " (uncorrelated variance at M = " + std::to_string(c.M) + ")");
    for (std::size_t si = 0; si < series.size(); ++si)
    {
        const detail::Series &s = series[si];
        const HardeningGrid g =
            compute_hardening_grid(s.kind, c.M_values, s.r, s.sigma, c.beta, c.shadowing_draws,
                                   c.master_seed, seed_domain::hardening | si, threads);
        for (std::size_t i = 0; i < g.M.size(); ++i)
        {
            t.row_labels.push_back(detail::series_tag(s));
            t.rows.push_back({g.M[i], g.v[i]});
        }
        t.provenance.push_back("threshold_" + detail::series_tag(s) + " = " +
                               detail::csv_number(interpolate_threshold(g.M, g.v, level)));
    }
    return t;
}

// ----------------------------------------- experiment: single-UE NMSE vs ---

// Single-UE MMSE NMSE versus r or sigma, one column per array. The NMSE is
// invariant to the nominal angle (the covariance changes by a unitary
// congruence), so each point is evaluated at the configured angle only.
inline ResultTable run_nmse_sweep(const ExperimentConfig &c)
{
    const double beta_t = std::pow(10.0, c.snr_dB / 10.0);
    struct Point
    {
        std::size_t series, value;
    };
    std::vector<Point> points;
    for (std::size_t si = 0; si < c.arrays.size(); ++si)
        for (std::size_t vi = 0; vi < c.values.size(); ++vi)
            points.push_back({si, vi});
    std::vector<double> means(points.size(), 0.0);

    detail::parallel_for_ws(
        points.size(), resolve_threads(c.threads), [] { return detail::TraceWsCache{}; },
        [&](detail::TraceWsCache &cache, std::size_t i) {
            const Point p = points[i];
            const ArrayKind kind = c.arrays[p.series];
            const double value = c.values[p.value];
            const double r_pt = c.axis == SweepAxis::r ? value : c.r;
            const double sigma_pt = c.axis == SweepAxis::sigma_dB ? value : c.sigma_dB;
            const CorrelationModelSpec m = model_for(c, kind, r_pt, sigma_pt, beta_t);
            const std::size_t draws =
                (kind != ArrayKind::uncorrelated && sigma_pt > 0.0) ? c.shadowing_draws : 1;
            RandomStream rng(derive_seed(c.master_seed, seed_domain::nmse | p.series, p.value));
            TraceWorkspace &ws = cache.get(m.M);
            double acc = 0.0;
            for (std::size_t d = 0; d < draws; ++d)
            {
                const CovarianceMatrix cov = build_covariance(m, rng);
                assemble_q(cov.R, ws.Q);
                acc += nmse_trace_path(cov.R, ws.Q, ws);
            }
            means[i] = acc / static_cast<double>(draws);
        });

    ResultTable t;
    t.name = c.output_prefix;
    t.provenance = config_provenance(c);
    t.columns.push_back(c.axis == SweepAxis::r ? "r" : "sigma_dB");
    for (ArrayKind k : c.arrays)
        t.columns.push_back(std::string("nmse_") + to_string(k));
    t.rows.assign(c.values.size(), std::vector<double>(t.columns.size(), 0.0));
    for (std::size_t vi = 0; vi < c.values.size(); ++vi)
        t.rows[vi][0] = c.values[vi];
    for (std::size_t i = 0; i < points.size(); ++i)
        t.rows[points[i].value][points[i].series + 1] = means[i];
    return t;
}

// ------------------------------------------ experiment: NMSE versus SNR ---

inline ResultTable run_nmse_vs_snr(const ExperimentConfig &c)
{
    struct SeriesM
    {
        ArrayKind kind;
        std::size_t M_req;
    };
    std::vector<SeriesM> series;
    for (ArrayKind k : c.arrays)
        for (std::size_t m : c.M_values)
            series.push_back({k, m});
    struct Point
    {
        std::size_t series, snr;
    };
    std::vector<Point> points;
    for (std::size_t si = 0; si < series.size(); ++si)
        for (std::size_t vi = 0; vi < c.snr_values_dB.size(); ++vi)
            points.push_back({si, vi});
    std::vector<double> means(points.size(), 0.0);

    detail::parallel_for_ws(
        points.size(), resolve_threads(c.threads), [] { return detail::TraceWsCache{}; },
        [&](detail::TraceWsCache &cache, std::size_t i) {
            const Point p = points[i];
            const SeriesM &s = series[p.series];
            const double beta_t = std::pow(10.0, c.snr_values_dB[p.snr] / 10.0);
            const CorrelationModelSpec m =
                model_for(c, s.kind, c.r, c.sigma_dB, beta_t, s.M_req);
            const std::size_t draws =
                (s.kind != ArrayKind::uncorrelated && c.sigma_dB > 0.0) ? c.shadowing_draws : 1;
            RandomStream rng(derive_seed(c.master_seed, seed_domain::snr | p.series, p.snr));
            TraceWorkspace &ws = cache.get(m.M);
            double acc = 0.0;
            for (std::size_t d = 0; d < draws; ++d)
            {
                const CovarianceMatrix cov = build_covariance(m, rng);
                assemble_q(cov.R, ws.Q);
                acc += nmse_trace_path(cov.R, ws.Q, ws);
            }
            means[i] = acc / static_cast<double>(draws);
        });

    ResultTable t;
    t.name = c.output_prefix;
    t.provenance = config_provenance(c);
    t.columns.push_back("snr_dB");
    for (const SeriesM &s : series)
    {
        const CorrelationModelSpec m = model_for(c, s.kind, c.r, c.sigma_dB, 1.0, s.M_req);
        t.columns.push_back(std::string("nmse_") + to_string(s.kind) + "_M" + std::to_string(m.M));
    }
    t.rows.assign(c.snr_values_dB.size(), std::vector<double>(t.columns.size(), 0.0));
    for (std::size_t vi = 0; vi < c.snr_values_dB.size(); ++vi)
        t.rows[vi][0] = c.snr_values_dB[vi];
    for (std::size_t i = 0; i < points.size(); ++i)
        t.rows[points[i].snr][points[i].series + 1] = means[i];
    return t;
}

// ------------------------------------- experiment: pilot contamination ---

// Correlation coefficient and/or contaminated NMSE versus the interferer
// angle, one series per interferer SNR. Shadowing realizations are drawn
// once per Monte Carlo draw and held fixed across the whole angle grid.
// Column means over the grid (the "floors") go into the provenance header.
inline ResultTable run_contamination(const ExperimentConfig &c)
{
    if (c.arrays.size() != 1)
        throw std::invalid_argument("model.arrays: contamination sweeps run one array kind");
    const ArrayKind kind = c.arrays[0];
    const bool upa = kind == ArrayKind::upa;
    const bool uncorr = kind == ArrayKind::uncorrelated; // flat reference series
    std::size_t M_h = 1, M_v = 1;
    if (upa)
    {
        const auto dims = upa_dims_checked(c);
        M_h = dims.first;
        M_v = dims.second;
    }
    const std::size_t n_az = c.azimuth_points;
    const std::size_t n_el = upa ? c.elevation_points : 1;
    const std::size_t n_angles = n_az * n_el;
    const bool want_coeff = c.metric != ContaminationMetric::nmse;
    const bool want_nmse = c.metric != ContaminationMetric::coefficient;
    const std::size_t per_snr = static_cast<std::size_t>(want_coeff) + want_nmse;
    const std::size_t n_snr = c.interferer_snr_values_dB.size();
    const std::size_t stride = n_snr * per_snr;
    const double beta_t = std::pow(10.0, c.snr_dB / 10.0);
    std::vector<double> beta_i(n_snr);
    for (std::size_t s = 0; s < n_snr; ++s)
        beta_i[s] = std::pow(10.0, c.interferer_snr_values_dB[s] / 10.0);
    const double theta_t = detail::deg2rad(c.theta_deg);
    const double phi_t = detail::deg2rad(c.phi_deg);
    const std::size_t draws = (c.sigma_dB > 0.0 && !uncorr) ? c.shadowing_draws : 1;

    std::vector<std::vector<double>> cells(draws); // draws x (angles * stride)
    detail::parallel_for_ws(
        draws, resolve_threads(c.threads), [] { return detail::TraceWsCache{}; },
        [&](detail::TraceWsCache &cache, std::size_t d) {
            RandomStream rng(derive_seed(c.master_seed, seed_domain::contamination, d));
            std::vector<double> f_t, f_i, f_tv, f_iv;
            if (c.sigma_dB > 0.0 && !uncorr)
            {
                if (upa)
                {
                    f_t = sample_shadowing(M_h, c.sigma_dB, rng);
                    f_tv = sample_shadowing(M_v, c.sigma_dB, rng);
                    f_i = sample_shadowing(M_h, c.sigma_dB, rng);
                    f_iv = sample_shadowing(M_v, c.sigma_dB, rng);
                }
                else
                {
                    f_t = sample_shadowing(c.M, c.sigma_dB, rng);
                    f_i = sample_shadowing(c.M, c.sigma_dB, rng);
                }
            }
            const CovarianceMatrix R_t =
                uncorr ? uncorrelated_rayleigh(c.M, beta_t)
                : upa  ? upa_covariance(M_h, M_v, c.r, theta_t, phi_t, beta_t, f_t, f_tv)
                       : exponential_ula(c.M, c.r, theta_t, beta_t, f_t);
            TraceWorkspace &ws = cache.get(c.M);
            std::vector<double> &out = cells[d];
            out.assign(n_angles * stride, 0.0);
            for (std::size_t a = 0; a < n_angles; ++a)
            {
                const std::size_t ja = a / n_el;
                const std::size_t ka = a % n_el;
                const double th = detail::deg2rad(-180.0 + 360.0 * static_cast<double>(ja) /
                                                               static_cast<double>(n_az));
                const double ph = detail::deg2rad(-90.0 + 180.0 * static_cast<double>(ka) /
                                                              static_cast<double>(n_el));
                const CovarianceMatrix R_i =
                    uncorr ? uncorrelated_rayleigh(c.M, 1.0)
                    : upa  ? upa_covariance(M_h, M_v, c.r, th, ph, 1.0, f_i, f_iv)
                           : exponential_ula(c.M, c.r, th, 1.0, f_i);
                for (std::size_t s = 0; s < n_snr; ++s)
                {
                    assemble_q(R_t.R, R_i.R, beta_i[s], ws.Q);
                    double *slot = out.data() + a * stride + s * per_snr;
                    if (want_coeff && want_nmse)
                    {
                        const JointMetrics jm = joint_trace_path(R_t.R, R_i.R, ws.Q, ws);
                        slot[0] = jm.coefficient;
                        slot[1] = jm.nmse;
                    }
                    else if (want_coeff)
                        slot[0] = coefficient_trace_path(R_t.R, R_i.R, ws.Q, ws);
                    else
                        slot[0] = nmse_trace_path(R_t.R, ws.Q, ws);
                }
            }
        });

    ResultTable t;
    t.name = c.output_prefix;
    t.provenance = config_provenance(c);
    t.columns.push_back("theta_deg");
    if (upa)
        t.columns.push_back("phi_deg");
    for (std::size_t s = 0; s < n_snr; ++s)
    {
        const std::string tag = detail::fmt_short(c.interferer_snr_values_dB[s]);
        if (want_coeff)
            t.columns.push_back("coeff_snr" + tag);
        if (want_nmse)
            t.columns.push_back("nmse_snr" + tag);
    }
    const std::size_t base = upa ? 2 : 1;
    t.rows.assign(n_angles, std::vector<double>(t.columns.size(), 0.0));
    for (std::size_t a = 0; a < n_angles; ++a)
    {
        const std::size_t ja = a / n_el;
        const std::size_t ka = a % n_el;
        t.rows[a][0] = -180.0 + 360.0 * static_cast<double>(ja) / static_cast<double>(n_az);
        if (upa)
            t.rows[a][1] = -90.0 + 180.0 * static_cast<double>(ka) / static_cast<double>(n_el);
        for (std::size_t k = 0; k < stride; ++k)
        {
            double acc = 0.0;
            for (std::size_t d = 0; d < draws; ++d)
                acc += cells[d][a * stride + k];
            t.rows[a][base + k] = acc / static_cast<double>(draws);
        }
    }
    for (std::size_t k = 0; k < stride; ++k)
    {
        double acc = 0.0;
        for (std::size_t a = 0; a < n_angles; ++a)
            acc += t.rows[a][base + k];
        t.provenance.push_back("floor_" + t.columns[base + k] + " = " +
                               detail::csv_number(acc / static_cast<double>(n_angles)));
    }
    return t;
}

// -------------------------------------------- experiment: summary table ---

namespace detail
{

// Grid/draw-averaged contaminated NMSE cells for one correlated array row of
// the summary table: one cell per interferer power.
inline std::array<double, 3> table_row_nmse(const ExperimentConfig &c, ArrayKind kind,
                                            const std::array<double, 3> &beta_i, double beta_t,
                                            std::uint64_t domain, std::size_t threads)
{
    const bool upa = kind == ArrayKind::upa;
    std::size_t M_h = 1, M_v = 1;
    if (upa)
    {
        const auto dims = upa_dims_checked(c);
        M_h = dims.first;
        M_v = dims.second;
    }
    // Pinned interferer angle grids: 64 azimuth points for the linear array,
    // 16 x 16 azimuth x elevation points for the planar one.
    const std::size_t n_az = upa ? 16 : 64;
    const std::size_t n_el = upa ? 16 : 1;
    const std::size_t n_angles = n_az * n_el;
    const double theta_t = deg2rad(c.theta_deg);
    const double phi_t = deg2rad(c.phi_deg);
    const std::size_t draws = c.sigma_dB > 0.0 ? c.shadowing_draws : 1;

    std::vector<std::array<double, 3>> sums(draws);
    parallel_for_ws(
        draws, threads, [] { return TraceWsCache{}; },
        [&](TraceWsCache &cache, std::size_t d) {
            RandomStream rng(derive_seed(c.master_seed, domain, d));
            std::vector<double> f_t, f_i, f_tv, f_iv;
            if (c.sigma_dB > 0.0)
            {
                if (upa)
                {
                    f_t = sample_shadowing(M_h, c.sigma_dB, rng);
                    f_tv = sample_shadowing(M_v, c.sigma_dB, rng);
                    f_i = sample_shadowing(M_h, c.sigma_dB, rng);
                    f_iv = sample_shadowing(M_v, c.sigma_dB, rng);
                }
                else
                {
                    f_t = sample_shadowing(c.M, c.sigma_dB, rng);
                    f_i = sample_shadowing(c.M, c.sigma_dB, rng);
                }
            }
            const CovarianceMatrix R_t =
                upa ? upa_covariance(M_h, M_v, c.r, theta_t, phi_t, beta_t, f_t, f_tv)
                    : exponential_ula(c.M, c.r, theta_t, beta_t, f_t);
            TraceWorkspace &ws = cache.get(c.M);
            std::array<double, 3> acc{0.0, 0.0, 0.0};
            for (std::size_t a = 0; a < n_angles; ++a)
            {
                const double th = deg2rad(-180.0 + 360.0 * static_cast<double>(a / n_el) /
                                                       static_cast<double>(n_az));
                const double ph = deg2rad(-90.0 + 180.0 * static_cast<double>(a % n_el) /
                                                      static_cast<double>(n_el));
                const CovarianceMatrix R_i =
                    upa ? upa_covariance(M_h, M_v, c.r, th, ph, 1.0, f_i, f_iv)
                        : exponential_ula(c.M, c.r, th, 1.0, f_i);
                for (std::size_t s = 0; s < 3; ++s)
                {
                    assemble_q(R_t.R, R_i.R, beta_i[s], ws.Q);
                    acc[s] += nmse_trace_path(R_t.R, ws.Q, ws);
                }
            }
            sums[d] = acc;
        });
    std::array<double, 3> total{0.0, 0.0, 0.0};
    for (std::size_t d = 0; d < draws; ++d)
        for (std::size_t s = 0; s < 3; ++s)
            total[s] += sums[d][s];
    const double n = static_cast<double>(draws) * static_cast<double>(n_angles);
    return {total[0] / n, total[1] / n, total[2] / n};
}

} // namespace detail

// The summary table: per array scenario, contaminated NMSE at equal / 10 dB
// weaker / 20 dB weaker interferer power plus the channel-hardening antenna
// threshold. Protocol constants (angle grids, interferer offsets) are
// pinned; shadowing_draws and the model parameters come from the config.
inline ResultTable run_table1(const ExperimentConfig &c)
{
    const std::size_t threads = resolve_threads(c.threads);
    const double beta_t = std::pow(10.0, c.snr_dB / 10.0);
    const std::array<double, 3> beta_i = {std::pow(10.0, c.snr_dB / 10.0),
                                          std::pow(10.0, (c.snr_dB - 10.0) / 10.0),
                                          std::pow(10.0, (c.snr_dB - 20.0) / 10.0)};
    const double level = 1.0 / static_cast<double>(c.M);

    ResultTable t;
    t.name = c.output_prefix;
    t.provenance = config_provenance(c);
    t.label_column = "scenario";
    t.columns = {"nmse_same_snr", "nmse_10db_weaker", "nmse_20db_weaker", "hardening_M_threshold"};

    std::size_t row_index = 0;
    for (ArrayKind kind : c.arrays)
    {
        ++row_index;
        std::array<double, 3> cells{};
        double threshold = std::numeric_limits<double>::quiet_NaN();
        if (kind == ArrayKind::uncorrelated)
        {
            // No randomness: both covariances are scaled identities.
            const CovarianceMatrix R_t = uncorrelated_rayleigh(c.M, beta_t);
            const CovarianceMatrix R_i = uncorrelated_rayleigh(c.M, 1.0);
            TraceWorkspace ws(c.M);
            for (std::size_t s = 0; s < 3; ++s)
            {
                assemble_q(R_t.R, R_i.R, beta_i[s], ws.Q);
                cells[s] = nmse_trace_path(R_t.R, ws.Q, ws);
            }
            const HardeningGrid g =
                compute_hardening_grid(kind, default_hardening_grid(), 0.0, 0.0, 1.0, 1,
                                       c.master_seed, seed_domain::table_hardening | row_index,
                                       threads);
            threshold = interpolate_threshold(g.M, g.v, level);
        }
        else
        {
            cells = detail::table_row_nmse(c, kind, beta_i, beta_t,
                                           seed_domain::table_rows | row_index, threads);
            const HardeningGrid g = compute_hardening_grid(
                kind, default_hardening_grid(), c.r, c.sigma_dB, 1.0, c.shadowing_draws,
                c.master_seed, seed_domain::table_hardening | row_index, threads);
            threshold = interpolate_threshold(g.M, g.v, level);
        }
        t.row_labels.push_back(to_string(kind));
        t.rows.push_back({cells[0], cells[1], cells[2], threshold});
    }
    return t;
}

// ------------------------------------------------------------- dispatch ---

inline ResultTable run_experiment(const ExperimentConfig &c)
{
    switch (c.kind)
    {
    case ExperimentKind::spectrum:
        return run_spectrum(c);
    case ExperimentKind::hardening_sweep:
        return run_hardening_sweep(c);
    case ExperimentKind::nmse_vs_param:
        return run_nmse_sweep(c);
    case ExperimentKind::nmse_vs_snr:
        return run_nmse_vs_snr(c);
    case ExperimentKind::contamination_sweep:
        return run_contamination(c);
    default:
        return run_table1(c);
    }
}

} // namespace mimo_spatia

#endif
