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
// Command line front end.
//   mimo-spatia run <config> [--out DIR] [--seed N] [--threads N]
//   mimo-spatia selftest
//   mimo-spatia --version
// Exit codes: 0 success, 1 configuration error, 2 numerical error,
// 3 I/O error. MIMO_SPATIA_THREADS overrides the config thread count when
// --threads is not given.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <mimo_spatia/channel.hpp>
#include <mimo_spatia/config.hpp>
#include <mimo_spatia/csv.hpp>
#include <mimo_spatia/estimator.hpp>
#include <mimo_spatia/scenarios.hpp>
#include <mimo_spatia/version.hpp>

namespace
{

using namespace mimo_spatia;

class IoError : public std::runtime_error
{
  public:
    explicit IoError(const std::string &msg) : std::runtime_error(msg) {}
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad())
        throw IoError("read failure on '" + path + "'");
    return os.str();
}

std::string utc_now_iso8601()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int env_threads()
{
    const char *raw = std::getenv("MIMO_SPATIA_THREADS");
    if (raw == nullptr || *raw == '\0')
        return 0;
    char *end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || v < 0)
        throw ConfigError(std::string("MIMO_SPATIA_THREADS: expected a non-negative integer, got '") +
                          raw + "'");
    return static_cast<int>(v);
}

int run_command(const std::string &config_path, const std::string &out_dir, bool seed_given,
                std::uint64_t seed, int threads_flag)
{
    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (seed_given)
        cfg.master_seed = seed;
    if (threads_flag > 0)
        cfg.threads = threads_flag;
    else if (const int et = env_threads(); et > 0)
        cfg.threads = et;

    const std::string started_at = utc_now_iso8601();
    const auto t0 = std::chrono::steady_clock::now();
    const ResultTable table = run_experiment(cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    const fs::path csv_path = fs::path(out_dir) / (cfg.output_prefix + ".csv");
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + csv_path.string() + "' for writing");
        write_csv(out, table);
        out.flush();
        if (!out)
            throw IoError("write failure on '" + csv_path.string() + "'");
    }
    if (cfg.write_manifest)
    {
        nlohmann::json manifest;
        manifest["tool"] = "mimo-spatia";
        manifest["version"] = version_string;
        manifest["config_file"] = config_path;
        manifest["config_resolved"] = serialize_config(cfg);
        manifest["master_seed"] = cfg.master_seed;
        manifest["threads_used"] = resolve_threads(cfg.threads);
        manifest["outputs"] = nlohmann::json::array({csv_path.string()});
        manifest["rows"] = table.rows.size();
        manifest["columns"] = table.columns.size() + (table.label_column.empty() ? 0 : 1);
        manifest["elapsed_seconds"] = elapsed;
        // Timestamps live in the manifest only; CSV bytes stay reproducible.
        manifest["started_at_utc"] = started_at;
        manifest["finished_at_utc"] = utc_now_iso8601();
        const fs::path manifest_path = fs::path(out_dir) / (cfg.output_prefix + ".manifest.json");
        std::ofstream out(manifest_path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + manifest_path.string() + "' for writing");
        out << manifest.dump(2) << "\n";
        if (!out)
            throw IoError("write failure on '" + manifest_path.string() + "'");
    }

    std::cout << "wrote " << csv_path.string() << " (" << table.rows.size() << " rows) in "
              << detail::fmt_short(elapsed) << " s\n";
    // Surface derived summary numbers (thresholds, floors) on stdout too.
    for (const std::string &line : table.provenance)
        if (line.rfind("threshold", 0) == 0 || line.rfind("floor_", 0) == 0)
            std::cout << line << "\n";
    return 0;
}

void check(bool ok, const char *what)
{
    if (!ok)
        throw std::runtime_error(std::string("selftest failed: ") + what);
}

int selftest_command()
{
    // 1. Two-UE uncorrelated NMSE has a closed form: (beta_i+1)/(beta_t+beta_i+1).
    {
        PilotScenario s;
        s.ues.push_back(make_ue(uncorrelated_rayleigh(16, 10.0), 10.0));
        s.ues.push_back(make_ue(uncorrelated_rayleigh(16, 10.0), 10.0));
        s.target_index = 0;
        check(std::abs(nmse_closed_form(s) - 11.0 / 21.0) < 1e-12, "uncorrelated two-UE NMSE");
    }
    // 2. Fully correlated array without shadowing never hardens: v = 1 exactly.
    {
        std::vector<double> p(64, 1.0);
        check(detail::hardening_variance_powers(1.0, p) == 1.0, "v(r=1) == 1");
        check(std::abs(detail::hardening_variance_powers(0.0, p) - 1.0 / 64.0) < 1e-15,
              "v(r=0) == 1/M");
    }
    // 3. Cholesky + solves reconstruct a known inverse application.
    {
        RandomStream rng(7);
        const std::size_t M = 16;
        CMat A(M, M);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j)
                A(i, j) = rng.standard_complex_gaussian();
        CMat Q = matmul(A, A.conj_transpose());
        for (std::size_t i = 0; i < M; ++i)
            Q(i, i) += 1.0;
        Q.hermitize_from_upper();
        const CMat X = hermitian_solve(Q, CMat::identity(M)); // X = Q^{-1}
        const CMat QX = matmul(Q, X);
        CMat E = QX;
        E -= CMat::identity(M);
        check(E.frobenius_norm() < 1e-10, "hermitian_solve residual");
    }
    // 4. Kronecker spectra multiply.
    {
        std::vector<double> fh, fv;
        const CovarianceMatrix Rh = exponential_ula(3, 0.6, 0.4, 2.0, fh);
        const CovarianceMatrix Rv = exponential_ula(4, 0.3, -0.9, 1.0, fv);
        const CovarianceMatrix K = upa_covariance(3, 4, 0.0, 0.0, 0.0, 1.0, fh, fv);
        (void)K;
        std::vector<double> prod;
        for (double a : eigen_spectrum(Rh))
            for (double b : eigen_spectrum(Rv))
                prod.push_back(a * b);
        std::sort(prod.begin(), prod.end(), std::greater<double>());
        CovarianceMatrix Kk;
        Kk.R = kron(Rh.R, Rv.R);
        Kk.spec.kind = ArrayKind::upa;
        Kk.spec.M = 12;
        Kk.spec.M_h = 3;
        Kk.spec.M_v = 4;
        const std::vector<double> eig = hermitian_eig(Kk.R).values;
        double worst = 0.0;
        for (std::size_t i = 0; i < eig.size(); ++i)
            worst = std::max(worst, std::abs(eig[i] - prod[i]));
        check(worst < 1e-8, "kron eigenvalue product");
    }
    // 5. Seed derivation and streams are reproducible.
    {
        RandomStream a(derive_seed(42, 1, 2)), b(derive_seed(42, 1, 2));
        for (int i = 0; i < 64; ++i)
            check(a.standard_normal() == b.standard_normal(), "stream reproducibility");
        check(derive_seed(42, 1, 2) != derive_seed(42, 1, 3), "seed domain separation");
    }
    // 6. Config round-trip.
    {
        const ExperimentConfig c = parse_config("[experiment]\nkind = summary_table\n");
        check(parse_config(serialize_config(c)) == c, "config round-trip");
    }
    std::cout << "selftest: 6 checks passed\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"spatially correlated massive-MIMO covariance and MMSE estimation experiments"};
    app.set_version_flag("--version", std::string("mimo-spatia ") + version_string);
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    int threads_flag = 0;
    CLI::App *run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (created if missing)");
    CLI::Option *seed_opt = run->add_option("--seed", seed, "override experiment.master_seed");
    run->add_option("--threads", threads_flag, "override worker thread count (0 = auto)");
    CLI::App *selftest = app.add_subcommand("selftest", "run quick built-in consistency checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        if (run->parsed())
            return run_command(config_path, out_dir, seed_opt->count() > 0, seed, threads_flag);
        if (selftest->parsed())
            return selftest_command();
        std::cerr << app.help();
        return 1;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const IoError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
