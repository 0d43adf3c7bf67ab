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
// Result tables and their CSV serialization. Numbers are written with 17
// significant digits so a double round-trips exactly; provenance lines are
// '#'-prefixed and carry only deterministic content (version, config echo,
// seeds) so that reruns produce byte-identical files.

#ifndef MIMO_SPATIA_CSV_HPP
#define MIMO_SPATIA_CSV_HPP

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo_spatia
{

struct ResultTable
{
    std::string name; // experiment identifier, becomes <prefix>.csv

    // Optional leading text column (e.g. a per-row scenario label).
    std::string label_column;
    std::vector<std::string> row_labels;

    std::vector<std::string> columns;       // numeric column names
    std::vector<std::vector<double>> rows;  // each row: one value per column
    std::vector<std::string> provenance;    // '#'-prefixed header lines
};

namespace detail
{

inline std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void validate_table(const ResultTable &t)
{
    if (t.columns.empty())
        throw std::invalid_argument("ResultTable: no columns");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != t.columns.size())
            throw std::invalid_argument("ResultTable: row " + std::to_string(i) + " has " +
                                        std::to_string(t.rows[i].size()) + " values, expected " +
                                        std::to_string(t.columns.size()));
    if (!t.label_column.empty() && t.row_labels.size() != t.rows.size())
        throw std::invalid_argument("ResultTable: label column set but row_labels size " +
                                    std::to_string(t.row_labels.size()) + " != row count " +
                                    std::to_string(t.rows.size()));
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        for (std::size_t j = i + 1; j < t.columns.size(); ++j)
            if (t.columns[i] == t.columns[j])
                throw std::invalid_argument("ResultTable: duplicate column name '" + t.columns[i] + "'");
}

// Writes the table as CSV: provenance comments, one header row, then data.
// Line endings are always LF regardless of platform.
inline void write_csv(std::ostream &os, const ResultTable &t)
{
    validate_table(t);
    for (const std::string &line : t.provenance)
        os << "# " << line << "\n";
    if (!t.label_column.empty())
        os << t.label_column << ",";
    for (std::size_t j = 0; j < t.columns.size(); ++j)
        os << (j != 0 ? "," : "") << t.columns[j];
    os << "\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        if (!t.label_column.empty())
            os << t.row_labels[i] << ",";
        for (std::size_t j = 0; j < t.rows[i].size(); ++j)
            os << (j != 0 ? "," : "") << detail::csv_number(t.rows[i][j]);
        os << "\n";
    }
}

} // namespace mimo_spatia

#endif
