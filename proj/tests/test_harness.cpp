// SPDX-License-Identifier: Apache-2.0
//
// qdiff: differential modulation for massive-MIMO uplinks with low-resolution ADCs
// Copyright (C) 2026 The qdiff authors
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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qdiff/config.hpp"
#include "qdiff/error.hpp"
#include "qdiff/simulate.hpp"

using namespace qdiff;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    SimConfig small_dpsk()
    {
        SimConfig c;
        c.num_rx = 8;
        c.num_uses = 32;
        c.psk_order = 4;
        c.tau_rms = 0.0;
        c.snr_db = {5.0};
        c.trials = 40;
        c.seed = 17;
        c.threads = 1;
        c.batch_size = 8;
        return c;
    }

    SimConfig small_dapsk(Detector d)
    {
        SimConfig c = small_dpsk();
        c.scheme = Scheme::Dapsk;
        c.num_tx = 1;
        c.num_symbols = 1;
        c.block_len = 1;
        c.adc_bits = 2;
        c.detector = d;
        c.num_rx = 24;
        c.threshold_trials = 10000;
        c.bussgang_samples = 200000;
        return c;
    }

    std::vector<std::vector<std::string>> parse_csv(const std::string &text)
    {
        std::vector<std::vector<std::string>> rows;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                cells.push_back(cell);
            rows.push_back(cells);
        }
        return rows;
    }
}

TEST_CASE("spectral efficiency")
{
    SimConfig c;
    c.scheme = Scheme::Dpsk;
    c.num_uses = 256;
    c.block_len = 2;
    c.psk_order = 8;
    const double full = (254.0 / 256.0) * 256.0 * 3.0;
    CHECK(spectral_efficiency(0.10, c) == 0.0);
    CHECK_THAT(spectral_efficiency(0.0, c), WithinRel(full, 1e-15));
    CHECK_THAT(spectral_efficiency(0.02, c), WithinRel(full * 0.98, 1e-15));
    CHECK_THAT(spectral_efficiency(0.05, c), WithinRel(full * 0.95, 1e-15));
    CHECK_THROWS_AS(spectral_efficiency(-0.1, c), DomainError);
    CHECK_THROWS_AS(spectral_efficiency(1.5, c), DomainError);

    c.scheme = Scheme::Coherent;
    c.detector = Detector::Ml;
    c.pilot_fraction = 0.5;
    CHECK_THAT(spectral_efficiency(0.0, c), WithinRel(0.5 * 256.0 * 3.0, 1e-15));
    c.pilot_fraction = 0.125;
    const double low_overhead = spectral_efficiency(0.01, c);
    c.pilot_fraction = 0.5;
    CHECK(spectral_efficiency(0.01, c) < low_overhead);

    c.scheme = Scheme::Dapsk;
    c.num_tx = 1;
    c.block_len = 1;
    c.num_symbols = 1;
    CHECK(bits_per_symbol(c) == 4);
    CHECK_THAT(data_fraction(c), WithinRel(255.0 / 256.0, 1e-15));
}

TEST_CASE("reference overhead of the differential frame")
{
    SimConfig c;
    CHECK(1.0 - data_fraction(c) <= 0.008);
}

TEST_CASE("bits per DPSK frame")
{
    for (std::size_t M : {2u, 4u, 8u, 16u})
    {
        SimConfig c = small_dpsk();
        c.psk_order = M;
        c.num_uses = 64;
        const Simulator sim(c);
        const auto op = sim.prepare(5.0);
        const auto counts = sim.run_trial(op, 0);
        const auto bits = static_cast<std::uint64_t>(std::log2(static_cast<double>(M)));
        CHECK(counts.bits == (64 / 2 - 1) * 2 * bits);
        CHECK(counts.symbols == (64 / 2 - 1) * 2);
    }
}

TEST_CASE("noiseless unquantized frames decode without errors")
{
    const double inf = std::numeric_limits<double>::infinity();
    SECTION("dpsk")
    {
        SimConfig c = small_dpsk();
        c.adc_bits = 0;
        c.snr_db = {inf};
        const auto r = Simulator(c).run_point(inf);
        CHECK(r.counts.bit_errors == 0);
        CHECK(r.counts.bits > 0);
    }
    SECTION("dpsk ofdm")
    {
        SimConfig c = small_dpsk();
        c.mode = Mode::Ofdm;
        c.adc_bits = 0;
        c.cp_len = 8;
        CHECK(Simulator(c).run_point(inf).counts.bit_errors == 0);
    }
    SECTION("dapsk")
    {
        SimConfig c = small_dapsk(Detector::Id);
        c.adc_bits = 0;
        const auto r = Simulator(c).run_point(inf);
        CHECK(r.counts.bit_errors == 0);
        CHECK(r.counts.amp_bit_errors == 0);
        CHECK(r.counts.bits == 40ull * 31 * 3);
    }
    SECTION("coherent")
    {
        SimConfig c = small_dpsk();
        c.scheme = Scheme::Coherent;
        c.detector = Detector::Decoupled;
        c.adc_bits = 0;
        c.pilot_fraction = 0.25;
        const auto r = Simulator(c).run_point(inf);
        CHECK(r.counts.bit_errors == 0);
        CHECK(r.counts.symbols == 40ull * 4 * 3 * 2);
    }
}

TEST_CASE("trials are determined by seed and index")
{
    for (auto c : {small_dpsk(), small_dapsk(Detector::Energy)})
    {
        const Simulator sim(c);
        const auto op = sim.prepare(3.0);
        for (std::uint64_t t : {0ull, 5ull, 123456789ull})
            CHECK(sim.run_trial(op, t) == sim.run_trial(op, t));
        CHECK_FALSE(sim.run_trial(op, 0) == sim.run_trial(op, 1));
    }
}

TEST_CASE("serial and parallel runs give identical counts")
{
    SimConfig one_bit_dapsk = small_dapsk(Detector::Ml);
    one_bit_dapsk.adc_bits = 1;
    for (auto c : {small_dpsk(), one_bit_dapsk})
    {
        c.snr_db = {0.0, 4.0};
        c.trials = 37;
        c.threads = 1;
        const auto serial = sweep(c);
        for (std::size_t threads : {2u, 3u, 8u})
            for (std::size_t batch : {1u, 5u, 64u})
            {
                c.threads = threads;
                c.batch_size = batch;
                const auto par = sweep(c);
                REQUIRE(par.size() == serial.size());
                for (std::size_t i = 0; i < par.size(); ++i)
                    CHECK(par[i].counts == serial[i].counts);
            }
    }
}

TEST_CASE("serial run equals the sum of individual trials")
{
    const SimConfig c = small_dpsk();
    const Simulator sim(c);
    const auto op = sim.prepare(5.0);
    TrialCounts sum;
    for (std::uint64_t t = 0; t < c.trials; ++t)
        sum += sim.run_trial(op, t);
    const auto r = sim.run_point(5.0);
    CHECK(r.counts == sum);
    CHECK(r.trials == c.trials);
    CHECK(r.ber == static_cast<double>(sum.bit_errors) / static_cast<double>(sum.bits));
    CHECK(r.ser == static_cast<double>(sum.symbol_errors) / static_cast<double>(sum.symbols));
}

TEST_CASE("early stopping")
{
    SimConfig c = small_dpsk();
    c.snr_db = {-10.0};
    c.trials = 400;
    c.stop_errors = 50;
    const auto r = Simulator(c).run_point(-10.0);
    CHECK(r.trials < 400);
    CHECK(r.trials % c.batch_size == 0);
    CHECK(r.counts.bit_errors >= 50);
}

TEST_CASE("sweep records")
{
    SimConfig c = small_dpsk();
    c.trials = 4;
    c.snr_db = {10.0};
    CHECK(sweep(c).size() == 1);
    c.snr_db = {10.0, -2.0, 4.0, 0.0};
    const auto rs = sweep(c);
    REQUIRE(rs.size() == 4);
    for (std::size_t i = 1; i < rs.size(); ++i)
        CHECK(rs[i - 1].snr_db < rs[i].snr_db);
    for (const auto &r : rs)
    {
        CHECK(r.ber >= 0.0);
        CHECK(r.ber <= 1.0);
        CHECK(r.ser >= 0.0);
        CHECK(r.ser <= 1.0);
        CHECK(r.seed == c.seed);
    }
}

TEST_CASE("csv output")
{
    SECTION("empty list")
    {
        CHECK(format_csv({}) == "snr_db,ber,ser,spectral_efficiency,bits,trials,seed\n");
    }
    SECTION("round trip at full precision")
    {
        MetricRecord r;
        r.snr_db = 0.1;
        r.ber = 1.0 / 3.0;
        r.ser = 2.0 / 7.0;
        r.spectral_efficiency = 761.123456789012345;
        r.counts.bits = 123456789012ull;
        r.trials = 10000;
        r.seed = 18446744073709551615ull;
        const auto rows = parse_csv(format_csv({r}));
        REQUIRE(rows.size() == 2);
        REQUIRE(rows[1].size() == 7);
        CHECK(std::stod(rows[1][0]) == r.snr_db);
        CHECK(std::stod(rows[1][1]) == r.ber);
        CHECK(std::stod(rows[1][2]) == r.ser);
        CHECK(std::stod(rows[1][3]) == r.spectral_efficiency);
        CHECK(std::stoull(rows[1][4]) == r.counts.bits);
        CHECK(std::stoull(rows[1][5]) == r.trials);
        CHECK(std::stoull(rows[1][6]) == r.seed);
    }
    SECTION("identical configuration gives identical bytes")
    {
        SimConfig c = small_dpsk();
        c.snr_db = {0.0, 6.0};
        const auto dir = std::filesystem::temp_directory_path() / "qdiff_test_harness";
        std::filesystem::create_directories(dir);
        const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
        write_csv(sweep(c), a);
        c.threads = 4;
        write_csv(sweep(c), b);
        auto slurp = [](const std::string &p) {
            std::ifstream f(p, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(f), {});
        };
        CHECK(slurp(a) == slurp(b));
        CHECK(parse_csv(slurp(a)).size() == 3);
        std::filesystem::remove_all(dir);
    }
    SECTION("write errors carry the path")
    {
        try
        {
            write_csv({}, "/nonexistent-dir/x.csv");
            FAIL("expected IoError");
        }
        catch (const IoError &e)
        {
            CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
        }
    }
}

TEST_CASE("configuration text")
{
    SimConfig c;
    c.scheme = Scheme::Dapsk;
    c.detector = Detector::Vql;
    c.num_tx = 1;
    c.num_symbols = 1;
    c.block_len = 1;
    c.num_rx = 84;
    c.adc_bits = 1;
    c.vql_sizes = std::array<std::size_t, 3>{28, 28, 28};
    c.snr_db = {-3.5, 0.1, 12.0};
    c.seed = 18446744073709551615ull;
    c.tau_rms = 123.456e-9;
    c.doppler_hz = 33.3;
    c.threshold = ThresholdMode::Analytic;
    c.phase_detector = PhaseDetector::InverseDecoding;
    const SimConfig back = parse_config(format_config(c));
    CHECK(format_config(back) == format_config(c));
    CHECK(back.snr_db == c.snr_db);
    CHECK(back.tau_rms == c.tau_rms);
    CHECK(back.seed == c.seed);
    CHECK(back.vql_sizes == c.vql_sizes);

    CHECK_THROWS_AS(parse_config("bogus_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("num_rx = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("num_uses = 255\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("trials = 0\n"), ConfigError);
    const SimConfig d = parse_config("# comment\n\nnum_rx = 16 # trailing\nsnr_db = 0:5:20\n");
    CHECK(d.num_rx == 16);
    CHECK(d.snr_db == std::vector<double>{0, 5, 10, 15, 20});
    CHECK_THROWS_AS(load_config("/nonexistent/cfg"), IoError);
}

TEST_CASE("invalid combinations are rejected before any trial")
{
    SimConfig c = small_dapsk(Detector::Energy);
    c.num_tx = 2;
    CHECK_THROWS_AS(Simulator(c), ConfigError);
    c = small_dapsk(Detector::Multibit);
    c.adc_bits = 0;
    CHECK_THROWS_AS(Simulator(c), ConfigError);
    c = small_dapsk(Detector::Energy);
    c.mode = Mode::Ofdm;
    CHECK_THROWS_AS(Simulator(c), ConfigError);
    c = small_dpsk();
    c.detector = Detector::Energy;
    CHECK_THROWS_AS(Simulator(c), ConfigError);
}

TEST_CASE("threshold calibration")
{
    SECTION("deterministic and csv shaped")
    {
        SimConfig c = small_dapsk(Detector::Energy);
        const auto a = threshold_table(c, {24, 48}, {0.0, 10.0});
        const auto b = threshold_table(c, {24, 48}, {0.0, 10.0});
        REQUIRE(a.size() == 4);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].gamma_mc == b[i].gamma_mc);
        const auto rows = parse_csv(format_threshold_csv(a));
        CHECK(rows[0] == std::vector<std::string>{"num_rx", "snr_db", "gamma_mc", "gamma_analytic"});
        CHECK(rows.size() == 5);
    }
    SECTION("noiseless unquantized thresholds separate perfectly")
    {
        SimConfig c = small_dapsk(Detector::Energy);
        c.adc_bits = 0;
        c.num_rx = 256;
        c.phase_detector = PhaseDetector::InverseDecoding;
        const Simulator sim(c);
        const auto op = sim.prepare(std::numeric_limits<double>::infinity());
        std::vector<double> low, high;
        sim.energy_samples(op, 10000, 5, low, high);
        const double g = sim.threshold_mc(op, 10000, 5);
        std::size_t errors = 0;
        for (double x : low)
            errors += x >= g;
        for (double x : high)
            errors += x < g;
        CHECK(errors == 0);
    }
    SECTION("non-DAPSK configurations are rejected")
    {
        CHECK_THROWS_AS(threshold_table(small_dpsk(), {16}, {0.0}), ConfigError);
    }
}

TEST_CASE("monte carlo threshold within 3% of the analytic one")
{
    SimConfig c = small_dapsk(Detector::Energy);
    c.num_rx = 256;
    c.threshold_trials = 20000;
    c.bussgang_samples = 1000000;
    const auto rows = threshold_table(c, {256}, {10.0});
    CHECK_THAT(rows[0].gamma_mc, WithinRel(rows[0].gamma_analytic, 0.03));
}
