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

#include <catch_amalgamated.hpp>

#include <string>
#include <vector>

#include <mimo_spatia/config.hpp>

using namespace mimo_spatia;

TEST_CASE("parse_config - minimal spectrum config fills the defaults", "[config]")
{
    const ExperimentConfig c = parse_config("[experiment]\n"
                                            "kind = spectrum\n"
                                            "[model]\n"
                                            "M = 100\n");
    CHECK(c.kind == ExperimentKind::spectrum);
    CHECK(c.M == 100u);
    CHECK(c.beta == 1.0);
    CHECK(c.master_seed == 0u);
    CHECK(c.threads == 0);
    REQUIRE(c.arrays.size() == 1u);
    CHECK(c.arrays[0] == ArrayKind::ula);
    CHECK(c.r_values == std::vector<double>{0.0, 0.25, 0.5, 0.9});
    CHECK(c.sigma_values_dB == std::vector<double>{0.0});
    CHECK(c.shadowing_draws == 1000u);
    CHECK(c.output_prefix == "spectrum");
    CHECK(c.write_manifest);
}

TEST_CASE("parse_config - full grammar with comments and spacing", "[config]")
{
    const ExperimentConfig c = parse_config("# leading comment\n"
                                            "[experiment]\n"
                                            "kind = contamination_sweep   ; trailing comment\n"
                                            "master_seed = 42\n"
                                            "threads=3\n"
                                            "\n"
                                            "[model]\n"
                                            "  arrays = upa\n"
                                            "  M = 64\n"
                                            "  M_h = 8\n"
                                            "  M_v = 8\n"
                                            "  r = 0.7\n"
                                            "  theta_deg = -12.5\n"
                                            "  phi_deg = 3.25\n"
                                            "  sigma_dB = 6\n"
                                            "  snr_dB = 10\n"
                                            "[sweep]\n"
                                            "interferer_snr_values_dB = 10, 0, -10\n"
                                            "metric = coefficient\n"
                                            "[monte_carlo]\n"
                                            "shadowing_draws = 250\n"
                                            "azimuth_points = 32\n"
                                            "elevation_points = 8\n"
                                            "[output]\n"
                                            "prefix = fig6\n"
                                            "write_manifest = false\n");
    CHECK(c.kind == ExperimentKind::contamination_sweep);
    CHECK(c.master_seed == 42u);
    CHECK(c.threads == 3);
    REQUIRE(c.arrays.size() == 1u);
    CHECK(c.arrays[0] == ArrayKind::upa);
    CHECK(c.M == 64u);
    CHECK(c.M_h == 8u);
    CHECK(c.M_v == 8u);
    CHECK(c.r == 0.7);
    CHECK(c.theta_deg == -12.5);
    CHECK(c.phi_deg == 3.25);
    CHECK(c.sigma_dB == 6.0);
    CHECK(c.interferer_snr_values_dB == std::vector<double>{10.0, 0.0, -10.0});
    CHECK(c.metric == ContaminationMetric::coefficient);
    CHECK(c.shadowing_draws == 250u);
    CHECK(c.azimuth_points == 32u);
    CHECK(c.elevation_points == 8u);
    CHECK(c.output_prefix == "fig6");
    CHECK_FALSE(c.write_manifest);
}

TEST_CASE("parse_config - domain violations name the key path", "[config]")
{
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = spectrum\n[model]\nr = 1.5\n"),
                      Catch::Matchers::ContainsSubstring("model.r"));
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = spectrum\n[model]\nsigma_dB = -2\n"),
                      Catch::Matchers::ContainsSubstring("model.sigma_dB"));
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = spectrum\n[model]\ntheta_deg = 180\n"),
                      Catch::Matchers::ContainsSubstring("model.theta_deg"));
    CHECK_THROWS_WITH(
        parse_config("[experiment]\nkind = spectrum\n[model]\nM = 10\nM_h = 3\nM_v = 4\n"),
        Catch::Matchers::ContainsSubstring("model.M"));
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = spectrum\n[model]\nM_h = 3\n"),
                      Catch::Matchers::ContainsSubstring("model.M_h"));
}

TEST_CASE("parse_config - syntax errors carry line and column", "[config]")
{
    // Unknown key on line 3.
    try
    {
        parse_config("[experiment]\nkind = spectrum\nbogus = 1\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.line == 3u);
        CHECK(e.col == 1u);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }

    // Unknown section.
    CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);

    // Key before any section.
    CHECK_THROWS_AS(parse_config("kind = spectrum\n"), ConfigError);

    // Missing '='.
    try
    {
        parse_config("[experiment]\n   kind spectrum\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.line == 2u);
        CHECK(e.col == 4u); // first non-blank column
    }

    // Empty value, malformed number, malformed section header.
    CHECK_THROWS_AS(parse_config("[experiment]\nkind =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = spectrum\nmaster_seed = twelve\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment\nkind = spectrum\n"), ConfigError);

    // Missing required kind.
    CHECK_THROWS_WITH(parse_config("[model]\nM = 4\n"),
                      Catch::Matchers::ContainsSubstring("experiment.kind"));
    CHECK_THROWS_AS(parse_config("[experiment]\nkind = frequency_sweep\n"), ConfigError);
}

TEST_CASE("parse_config - per-kind guard rails", "[config]")
{
    // Contamination sweeps take exactly one array kind.
    CHECK_THROWS_WITH(
        parse_config("[experiment]\nkind = contamination_sweep\n[model]\narrays = ula, upa\n"),
        Catch::Matchers::ContainsSubstring("model.arrays"));

    // Summary tables pin the interferer powers to the protocol.
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = summary_table\n[sweep]\n"
                                   "interferer_snr_values_dB = 5\n"),
                      Catch::Matchers::ContainsSubstring("sweep.interferer_snr_values_dB"));

    // Estimation experiments reject an explicit non-unit beta: effective
    // SNRs, not beta, set the UE powers there.
    CHECK_THROWS_WITH(parse_config("[experiment]\nkind = nmse_vs_param\n[model]\nbeta = 2\n"),
                      Catch::Matchers::ContainsSubstring("model.beta"));
    // beta = 1 written out explicitly stays legal.
    CHECK_NOTHROW(parse_config("[experiment]\nkind = nmse_vs_param\n[model]\nbeta = 1\n"));
    // Spectrum experiments are covariance-only; beta is free there.
    CHECK_NOTHROW(parse_config("[experiment]\nkind = spectrum\n[model]\nbeta = 2\n"));
}

TEST_CASE("parse_config - summary table defaults", "[config]")
{
    const ExperimentConfig c = parse_config("[experiment]\nkind = summary_table\n");
    REQUIRE(c.arrays.size() == 3u);
    CHECK(c.arrays[0] == ArrayKind::uncorrelated);
    CHECK(c.arrays[1] == ArrayKind::ula);
    CHECK(c.arrays[2] == ArrayKind::upa);
    CHECK(c.r == 0.5);
    CHECK(c.sigma_dB == 4.0);
    CHECK(c.M == 100u);
    CHECK(c.snr_dB == 10.0);
    CHECK(c.output_prefix == "summary_table");
}

TEST_CASE("parse_config - upa factor helpers", "[config]")
{
    ExperimentConfig c = parse_config("[experiment]\nkind = spectrum\n[model]\nM = 100\n");
    CHECK(c.upa_h() == 10u);
    CHECK(c.upa_v() == 10u);
    c = parse_config("[experiment]\nkind = spectrum\n[model]\nM = 24\nM_h = 6\nM_v = 4\n");
    CHECK(c.upa_h() == 6u);
    CHECK(c.upa_v() == 4u);
}

TEST_CASE("serialize_config - round-trips every experiment kind", "[config]")
{
    const char *samples[] = {
        "[experiment]\nkind = spectrum\n[model]\nM = 64\n",
        "[experiment]\nkind = hardening_sweep\n[sweep]\nM_values = 9, 16, 25\n",
        "[experiment]\nkind = nmse_vs_param\n[sweep]\naxis = sigma_dB\nvalues = 0, 2, 4\n",
        "[experiment]\nkind = nmse_vs_snr\n[sweep]\nsnr_values_dB = -10, 0, 10\nM_values = 10\n",
        "[experiment]\nkind = contamination_sweep\n[model]\narrays = ula\nsigma_dB = 6\n",
        "[experiment]\nkind = summary_table\n[monte_carlo]\nshadowing_draws = 10\n",
    };
    for (const char *text : samples)
    {
        const ExperimentConfig c = parse_config(text);
        const std::string serialized = serialize_config(c);
        const ExperimentConfig back = parse_config(serialized);
        CHECK(back == c);
        // Serialization is a fixed point: serializing again changes nothing.
        CHECK(serialize_config(back) == serialized);
    }
}

TEST_CASE("serialize_config - floating-point values survive exactly", "[config]")
{
    ExperimentConfig c = parse_config("[experiment]\nkind = spectrum\n[model]\n"
                                      "r = 0.33333333333333331\ntheta_deg = -179.99999999999997\n");
    const ExperimentConfig back = parse_config(serialize_config(c));
    CHECK(back.r == c.r);
    CHECK(back.theta_deg == c.theta_deg);
}
