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
// Experiment configuration: a flat key-value format with [sections].
// Grammar (documented in README.md):
//   - UTF-8 text, line oriented; '#' and ';' start comments.
//   - '[section]' lines open a section; 'key = value' lines assign.
//   - Lists are comma separated. Unknown sections or keys are rejected
//     with the offending line and column.
// Sections: [experiment] [model] [sweep] [monte_carlo] [output].

#ifndef MIMO_SPATIA_CONFIG_HPP
#define MIMO_SPATIA_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covmodel.hpp"

namespace mimo_spatia
{

class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::size_t line, std::size_t col, const std::string &msg)
        : std::runtime_error("config:" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col)
    {
    }
    explicit ConfigError(const std::string &msg) : std::runtime_error("config: " + msg), line(0), col(0)
    {
    }
    std::size_t line, col;
};

enum class ExperimentKind
{
    spectrum,
    hardening_sweep,
    nmse_vs_param,
    nmse_vs_snr,
    contamination_sweep,
    summary_table
};

inline const char *to_string(ExperimentKind k)
{
    switch (k)
    {
    case ExperimentKind::spectrum:
        return "spectrum";
    case ExperimentKind::hardening_sweep:
        return "hardening_sweep";
    case ExperimentKind::nmse_vs_param:
        return "nmse_vs_param";
    case ExperimentKind::nmse_vs_snr:
        return "nmse_vs_snr";
    case ExperimentKind::contamination_sweep:
        return "contamination_sweep";
    default:
        return "summary_table";
    }
}

enum class SweepAxis
{
    r,
    sigma_dB
};

inline const char *to_string(SweepAxis a) { return a == SweepAxis::r ? "r" : "sigma_dB"; }

enum class ContaminationMetric
{
    coefficient,
    nmse,
    both
};

inline const char *to_string(ContaminationMetric m)
{
    switch (m)
    {
    case ContaminationMetric::coefficient:
        return "coefficient";
    case ContaminationMetric::nmse:
        return "nmse";
    default:
        return "both";
    }
}

struct ExperimentConfig
{
    // [experiment]
    ExperimentKind kind = ExperimentKind::spectrum;
    std::uint64_t master_seed = 0;
    int threads = 0; // 0 = automatic

    // [model]
    std::vector<ArrayKind> arrays; // series selection where applicable
    std::size_t M = 100;
    std::size_t M_h = 0; // 0 = derive round(sqrt(M)) for UPA
    std::size_t M_v = 0;
    double beta = 1.0;
    double r = 0.5;
    double theta_deg = 30.0;
    double phi_deg = 30.0;
    double sigma_dB = 0.0;
    double snr_dB = 10.0; // desired-UE effective SNR

    // [sweep]
    SweepAxis axis = SweepAxis::r;
    std::vector<double> values; // nmse_vs_param axis values
    std::vector<double> r_values;
    std::vector<double> sigma_values_dB;
    std::vector<double> snr_values_dB;
    std::vector<std::size_t> M_values;
    std::vector<double> interferer_snr_values_dB;
    ContaminationMetric metric = ContaminationMetric::both;

    // [monte_carlo]
    std::size_t shadowing_draws = 1000;
    std::size_t azimuth_points = 64;
    std::size_t elevation_points = 16;

    // [output]
    std::string output_prefix; // defaults to the kind name
    bool write_manifest = true;

    bool operator==(const ExperimentConfig &) const = default;

    std::size_t upa_h() const { return M_h != 0 ? M_h : nearest_square_side(M); }
    std::size_t upa_v() const { return M_v != 0 ? M_v : nearest_square_side(M); }

    static std::size_t nearest_square_side(std::size_t M)
    {
        const auto s = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(M))));
        return s < 1 ? 1 : s;
    }
};

namespace detail
{

inline std::string fmt_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view v, std::size_t line, std::size_t col)
{
    double out = 0.0;
    const char *first = v.data();
    const char *last = v.data() + v.size();
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError(line, col, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline std::uint64_t parse_u64(std::string_view v, std::size_t line, std::size_t col)
{
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(line, col, "expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

inline std::vector<std::string_view> split_list(std::string_view v)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= v.size(); ++i)
        if (i == v.size() || v[i] == ',')
        {
            parts.push_back(trim(v.substr(start, i - start)));
            start = i + 1;
        }
    return parts;
}

struct RawEntry
{
    std::string value;
    std::size_t line, col;
};

} // namespace detail

// Parses and fully validates a config; defaults are applied so the result is
// self-contained (serialize_config(parse_config(text)) round-trips).
inline ExperimentConfig parse_config(std::string_view text)
{
    using detail::RawEntry;
    static const std::map<std::string, std::set<std::string>> schema = {
        {"experiment", {"kind", "master_seed", "threads"}},
        {"model",
         {"arrays", "M", "M_h", "M_v", "beta", "r", "theta_deg", "phi_deg", "sigma_dB", "snr_dB"}},
        {"sweep",
         {"axis", "values", "r_values", "sigma_values_dB", "snr_values_dB", "M_values",
          "interferer_snr_values_dB", "metric"}},
        {"monte_carlo", {"shadowing_draws", "azimuth_points", "elevation_points"}},
        {"output", {"prefix", "write_manifest"}}};

    std::map<std::string, RawEntry> entries; // "section.key" -> value
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, eol - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = eol + 1;

        std::string_view body = raw;
        const std::size_t cpos = std::min(body.find('#'), body.find(';'));
        if (cpos != std::string_view::npos)
            body = body.substr(0, cpos);
        body = detail::trim(body);
        if (body.empty())
        {
            if (eol == text.size())
                break;
            continue;
        }
        const std::size_t col = static_cast<std::size_t>(body.data() - (text.data() + line_start)) + 1;

        if (body.front() == '[')
        {
            if (body.back() != ']' || body.size() < 3)
                throw ConfigError(line_no, col, "malformed section header");
            section = std::string(detail::trim(body.substr(1, body.size() - 2)));
            if (schema.find(section) == schema.end())
                throw ConfigError(line_no, col, "unknown section [" + section + "]");
        }
        else
        {
            const std::size_t eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError(line_no, col, "expected 'key = value'");
            const std::string key{detail::trim(body.substr(0, eq))};
            const std::string_view val = detail::trim(body.substr(eq + 1));
            if (section.empty())
                throw ConfigError(line_no, col, "key '" + key + "' outside of any [section]");
            if (key.empty())
                throw ConfigError(line_no, col, "empty key");
            const auto &allowed = schema.at(section);
            if (allowed.find(key) == allowed.end())
                throw ConfigError(line_no, col, "unknown key '" + section + "." + key + "'");
            if (val.empty())
                throw ConfigError(line_no, col, "empty value for '" + section + "." + key + "'");
            const std::size_t vcol = col + static_cast<std::size_t>(val.empty() ? 0 : val.data() - body.data());
            entries[section + "." + key] = RawEntry{std::string(val), line_no, vcol};
        }
        if (eol == text.size())
            break;
    }

    ExperimentConfig c;
    auto take = [&](const char *path) -> const RawEntry * {
        auto it = entries.find(path);
        return it == entries.end() ? nullptr : &it->second;
    };

    // --- experiment ---
    const RawEntry *e = take("experiment.kind");
    if (e == nullptr)
        throw ConfigError("missing required key 'experiment.kind'");
    {
        const std::string &v = e->value;
        if (v == "spectrum")
            c.kind = ExperimentKind::spectrum;
        else if (v == "hardening_sweep")
            c.kind = ExperimentKind::hardening_sweep;
        else if (v == "nmse_vs_param")
            c.kind = ExperimentKind::nmse_vs_param;
        else if (v == "nmse_vs_snr")
            c.kind = ExperimentKind::nmse_vs_snr;
        else if (v == "contamination_sweep")
            c.kind = ExperimentKind::contamination_sweep;
        else if (v == "summary_table")
            c.kind = ExperimentKind::summary_table;
        else
            throw ConfigError(e->line, e->col, "experiment.kind: unknown kind '" + v + "'");
    }
    if ((e = take("experiment.master_seed")) != nullptr)
        c.master_seed = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("experiment.threads")) != nullptr)
        c.threads = static_cast<int>(detail::parse_u64(e->value, e->line, e->col));

    // --- model ---
    if ((e = take("model.arrays")) != nullptr)
    {
        c.arrays.clear();
        for (std::string_view part : detail::split_list(e->value))
        {
            if (part == "ula")
                c.arrays.push_back(ArrayKind::ula);
            else if (part == "upa")
                c.arrays.push_back(ArrayKind::upa);
            else if (part == "uncorrelated")
                c.arrays.push_back(ArrayKind::uncorrelated);
            else
                throw ConfigError(e->line, e->col,
                                  "model.arrays: unknown array kind '" + std::string(part) + "'");
        }
        if (c.arrays.empty())
            throw ConfigError(e->line, e->col, "model.arrays: list must be non-empty");
    }
    if ((e = take("model.M")) != nullptr)
        c.M = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("model.M_h")) != nullptr)
        c.M_h = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("model.M_v")) != nullptr)
        c.M_v = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("model.beta")) != nullptr)
        c.beta = detail::parse_double(e->value, e->line, e->col);
    if ((e = take("model.r")) != nullptr)
        c.r = detail::parse_double(e->value, e->line, e->col);
    if ((e = take("model.theta_deg")) != nullptr)
        c.theta_deg = detail::parse_double(e->value, e->line, e->col);
    if ((e = take("model.phi_deg")) != nullptr)
        c.phi_deg = detail::parse_double(e->value, e->line, e->col);
    if ((e = take("model.sigma_dB")) != nullptr)
        c.sigma_dB = detail::parse_double(e->value, e->line, e->col);
    if ((e = take("model.snr_dB")) != nullptr)
        c.snr_dB = detail::parse_double(e->value, e->line, e->col);

    // --- sweep ---
    if ((e = take("sweep.axis")) != nullptr)
    {
        if (e->value == "r")
            c.axis = SweepAxis::r;
        else if (e->value == "sigma_dB")
            c.axis = SweepAxis::sigma_dB;
        else
            throw ConfigError(e->line, e->col, "sweep.axis: must be 'r' or 'sigma_dB'");
    }
    auto read_doubles = [&](const char *path, std::vector<double> &out) {
        if (const RawEntry *re = take(path))
        {
            out.clear();
            for (std::string_view part : detail::split_list(re->value))
                out.push_back(detail::parse_double(part, re->line, re->col));
        }
    };
    read_doubles("sweep.values", c.values);
    read_doubles("sweep.r_values", c.r_values);
    read_doubles("sweep.sigma_values_dB", c.sigma_values_dB);
    read_doubles("sweep.snr_values_dB", c.snr_values_dB);
    read_doubles("sweep.interferer_snr_values_dB", c.interferer_snr_values_dB);
    if ((e = take("sweep.M_values")) != nullptr)
    {
        c.M_values.clear();
        for (std::string_view part : detail::split_list(e->value))
            c.M_values.push_back(detail::parse_u64(part, e->line, e->col));
    }
    if ((e = take("sweep.metric")) != nullptr)
    {
        if (e->value == "coefficient")
            c.metric = ContaminationMetric::coefficient;
        else if (e->value == "nmse")
            c.metric = ContaminationMetric::nmse;
        else if (e->value == "both")
            c.metric = ContaminationMetric::both;
        else
            throw ConfigError(e->line, e->col, "sweep.metric: must be coefficient, nmse or both");
    }

    // --- monte_carlo ---
    if ((e = take("monte_carlo.shadowing_draws")) != nullptr)
        c.shadowing_draws = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("monte_carlo.azimuth_points")) != nullptr)
        c.azimuth_points = detail::parse_u64(e->value, e->line, e->col);
    if ((e = take("monte_carlo.elevation_points")) != nullptr)
        c.elevation_points = detail::parse_u64(e->value, e->line, e->col);

    // --- output ---
    if ((e = take("output.prefix")) != nullptr)
        c.output_prefix = e->value;
    if ((e = take("output.write_manifest")) != nullptr)
    {
        if (e->value == "true")
            c.write_manifest = true;
        else if (e->value == "false")
            c.write_manifest = false;
        else
            throw ConfigError(e->line, e->col, "output.write_manifest: must be true or false");
    }

    // --- defaults per kind ---
    const bool beta_explicit = take("model.beta") != nullptr;
    switch (c.kind)
    {
    case ExperimentKind::spectrum:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::ula};
        if (c.r_values.empty())
            c.r_values = {0.0, 0.25, 0.5, 0.9};
        if (c.sigma_values_dB.empty())
            c.sigma_values_dB = {0.0};
        break;
    case ExperimentKind::hardening_sweep:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::uncorrelated, ArrayKind::ula, ArrayKind::upa};
        if (c.r_values.empty())
            c.r_values = {0.5};
        if (c.sigma_values_dB.empty())
            c.sigma_values_dB = {4.0};
        if (c.M_values.empty())
            c.M_values = {9,   16,  25,  36,  49,  64,  81,  100, 144, 196,
                          256, 324, 400, 484, 576, 676, 784, 900};
        break;
    case ExperimentKind::nmse_vs_param:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::ula, ArrayKind::upa};
        if (c.values.empty())
            c.values = (c.axis == SweepAxis::r)
                           ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}
                           : std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
        break;
    case ExperimentKind::nmse_vs_snr:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::ula, ArrayKind::upa};
        if (c.snr_values_dB.empty())
            for (int s = -10; s <= 20; s += 2)
                c.snr_values_dB.push_back(s);
        if (c.M_values.empty())
            c.M_values = {10, 50, 100};
        break;
    case ExperimentKind::contamination_sweep:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::ula};
        if (c.interferer_snr_values_dB.empty())
            c.interferer_snr_values_dB = {10.0, 0.0, -10.0};
        break;
    case ExperimentKind::summary_table:
        if (c.arrays.empty())
            c.arrays = {ArrayKind::uncorrelated, ArrayKind::ula, ArrayKind::upa};
        if ((e = take("sweep.interferer_snr_values_dB")) != nullptr)
            throw ConfigError(e->line, e->col,
                              "sweep.interferer_snr_values_dB: fixed for summary tables "
                              "(model.snr_dB and 10/20 dB weaker)");
        c.r = take("model.r") != nullptr ? c.r : 0.5;
        c.sigma_dB = take("model.sigma_dB") != nullptr ? c.sigma_dB : 4.0;
        break;
    }
    if (c.output_prefix.empty())
        c.output_prefix = to_string(c.kind);

    // --- domain validation (key paths in messages) ---
    auto reject = [&](const char *path, const std::string &why) {
        throw ConfigError(std::string(path) + ": " + why);
    };
    if (!(c.r >= 0.0 && c.r <= 1.0))
        reject("model.r", "correlation factor must lie in [0, 1]");
    for (double v : c.r_values)
        if (!(v >= 0.0 && v <= 1.0))
            reject("sweep.r_values", "correlation factors must lie in [0, 1]");
    if (c.kind == ExperimentKind::nmse_vs_param && c.axis == SweepAxis::r)
        for (double v : c.values)
            if (!(v >= 0.0 && v <= 1.0))
                reject("sweep.values", "correlation factors must lie in [0, 1]");
    if (c.kind == ExperimentKind::nmse_vs_param && c.axis == SweepAxis::sigma_dB)
        for (double v : c.values)
            if (!(v >= 0.0))
                reject("sweep.values", "shadowing deviations must be >= 0");
    if (!(c.sigma_dB >= 0.0))
        reject("model.sigma_dB", "shadowing deviation must be >= 0");
    for (double v : c.sigma_values_dB)
        if (!(v >= 0.0))
            reject("sweep.sigma_values_dB", "shadowing deviations must be >= 0");
    if (!(c.beta > 0.0))
        reject("model.beta", "large-scale coefficient must be > 0");
    if (!(c.theta_deg >= -180.0 && c.theta_deg < 180.0))
        reject("model.theta_deg", "azimuth must lie in [-180, 180)");
    if (!(c.phi_deg >= -90.0 && c.phi_deg < 90.0))
        reject("model.phi_deg", "elevation must lie in [-90, 90)");
    if (c.M < 1)
        reject("model.M", "antenna count must be >= 1");
    if (c.M_h != 0 && c.M_v != 0 && c.M_h * c.M_v != c.M)
        reject("model.M", "must equal M_h * M_v when both factors are given");
    if ((c.M_h == 0) != (c.M_v == 0))
        reject("model.M_h", "give both M_h and M_v or neither");
    if (c.shadowing_draws < 1)
        reject("monte_carlo.shadowing_draws", "need at least one draw");
    if (c.azimuth_points < 1)
        reject("monte_carlo.azimuth_points", "need at least one grid point");
    if (c.elevation_points < 1)
        reject("monte_carlo.elevation_points", "need at least one grid point");
    if (c.M_values.empty() &&
        (c.kind == ExperimentKind::hardening_sweep || c.kind == ExperimentKind::nmse_vs_snr))
        reject("sweep.M_values", "list must be non-empty");
    for (std::size_t m : c.M_values)
        if (m < 1)
            reject("sweep.M_values", "antenna counts must be >= 1");
    if (c.kind == ExperimentKind::nmse_vs_param && c.values.empty())
        reject("sweep.values", "list must be non-empty");
    if (c.kind == ExperimentKind::nmse_vs_snr && c.snr_values_dB.empty())
        reject("sweep.snr_values_dB", "list must be non-empty");
    if (c.kind == ExperimentKind::contamination_sweep && c.interferer_snr_values_dB.empty())
        reject("sweep.interferer_snr_values_dB", "list must be non-empty");
    if (c.kind == ExperimentKind::contamination_sweep && c.arrays.size() != 1)
        reject("model.arrays", "contamination sweeps run one array kind per config");
    const bool estimation_kind = c.kind == ExperimentKind::nmse_vs_param ||
                                 c.kind == ExperimentKind::nmse_vs_snr ||
                                 c.kind == ExperimentKind::contamination_sweep ||
                                 c.kind == ExperimentKind::summary_table;
    if (estimation_kind && beta_explicit && c.beta != 1.0)
        reject("model.beta",
               "fixed to 1 for estimation experiments; effective SNRs set the UE powers");
    return c;
}

// Serializes a resolved config; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig &c)
{
    std::ostringstream os;
    auto list_d = [&](const std::vector<double> &v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i != 0 ? ", " : "") + detail::fmt_g17(v[i]);
        return s;
    };
    os << "[experiment]\n";
    os << "kind = " << to_string(c.kind) << "\n";
    os << "master_seed = " << c.master_seed << "\n";
    os << "threads = " << c.threads << "\n";
    os << "[model]\n";
    os << "arrays = ";
    for (std::size_t i = 0; i < c.arrays.size(); ++i)
        os << (i != 0 ? ", " : "") << to_string(c.arrays[i]);
    os << "\n";
    os << "M = " << c.M << "\n";
    os << "M_h = " << c.M_h << "\n";
    os << "M_v = " << c.M_v << "\n";
    os << "beta = " << detail::fmt_g17(c.beta) << "\n";
    os << "r = " << detail::fmt_g17(c.r) << "\n";
    os << "theta_deg = " << detail::fmt_g17(c.theta_deg) << "\n";
    os << "phi_deg = " << detail::fmt_g17(c.phi_deg) << "\n";
    os << "sigma_dB = " << detail::fmt_g17(c.sigma_dB) << "\n";
    os << "snr_dB = " << detail::fmt_g17(c.snr_dB) << "\n";
    os << "[sweep]\n";
    os << "axis = " << to_string(c.axis) << "\n";
    if (!c.values.empty())
        os << "values = " << list_d(c.values) << "\n";
    if (!c.r_values.empty())
        os << "r_values = " << list_d(c.r_values) << "\n";
    if (!c.sigma_values_dB.empty())
        os << "sigma_values_dB = " << list_d(c.sigma_values_dB) << "\n";
    if (!c.snr_values_dB.empty())
        os << "snr_values_dB = " << list_d(c.snr_values_dB) << "\n";
    if (!c.M_values.empty())
    {
        os << "M_values = ";
        for (std::size_t i = 0; i < c.M_values.size(); ++i)
            os << (i != 0 ? ", " : "") << c.M_values[i];
        os << "\n";
    }
    if (!c.interferer_snr_values_dB.empty())
        os << "interferer_snr_values_dB = " << list_d(c.interferer_snr_values_dB) << "\n";
    os << "metric = " << to_string(c.metric) << "\n";
    os << "[monte_carlo]\n";
    os << "shadowing_draws = " << c.shadowing_draws << "\n";
    os << "azimuth_points = " << c.azimuth_points << "\n";
    os << "elevation_points = " << c.elevation_points << "\n";
    os << "[output]\n";
    os << "prefix = " << c.output_prefix << "\n";
    os << "write_manifest = " << (c.write_manifest ? "true" : "false") << "\n";
    return os.str();
}

} // namespace mimo_spatia

#endif
