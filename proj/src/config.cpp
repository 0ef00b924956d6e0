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

#include "qdiff/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qdiff/error.hpp"

namespace qdiff
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::string quoted(std::string_view key) { return "'" + std::string(key) + "'"; }

        double to_double(std::string_view key, std::string_view v)
        {
            v = trim(v);
            if (v == "inf" || v == "+inf")
                return std::numeric_limits<double>::infinity();
            double out = 0.0;
            const auto *end = v.data() + v.size();
            const auto res = std::from_chars(v.data(), end, out);
            if (res.ec != std::errc() || res.ptr != end || v.empty())
                throw ConfigError("invalid number for " + quoted(key) + ": '" + std::string(v) + "'");
            return out;
        }

        std::uint64_t to_uint(std::string_view key, std::string_view v)
        {
            v = trim(v);
            std::uint64_t out = 0;
            const auto *end = v.data() + v.size();
            const auto res = std::from_chars(v.data(), end, out);
            if (res.ec != std::errc() || res.ptr != end || v.empty())
                throw ConfigError("invalid non-negative integer for " + quoted(key) + ": '" + std::string(v) + "'");
            return out;
        }

        std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = s.find(sep, start);
                out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        std::string fmt(double v)
        {
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }
    }

    std::vector<double> parse_double_list(std::string_view text)
    {
        text = trim(text);
        if (text.empty())
            throw ConfigError("empty list");
        if (text.find(':') != std::string_view::npos)
        {
            const auto parts = split(text, ':');
            if (parts.size() != 3)
                throw ConfigError("range must be start:step:stop");
            const double a = to_double("range", parts[0]), st = to_double("range", parts[1]),
                         b = to_double("range", parts[2]);
            if (!(st > 0.0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b))
                throw ConfigError("range needs a positive step and start <= stop");
            std::vector<double> out;
            const auto n = static_cast<std::size_t>(std::floor((b - a) / st + 1e-9));
            for (std::size_t i = 0; i <= n; ++i)
                out.push_back(a + st * static_cast<double>(i));
            return out;
        }
        std::vector<double> out;
        for (auto p : split(text, ','))
            out.push_back(to_double("list", p));
        return out;
    }

    std::string to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::Dpsk: return "dpsk";
        case Scheme::Dapsk: return "dapsk";
        case Scheme::Coherent: return "coherent";
        }
        return "?";
    }

    std::string to_string(Detector d)
    {
        switch (d)
        {
        case Detector::Ml: return "ml";
        case Detector::Decoupled: return "decoupled";
        case Detector::Id: return "id";
        case Detector::Multibit: return "multibit";
        case Detector::Energy: return "energy";
        case Detector::Vql: return "vql";
        case Detector::Coherent: return "coherent";
        }
        return "?";
    }

    std::string to_string(Mode m) { return m == Mode::SingleCarrier ? "sc" : "ofdm"; }

    void set_option(SimConfig &c, std::string_view key, std::string_view raw)
    {
        key = trim(key);
        const std::string_view v = trim(raw);
        auto count = [&](std::size_t &field) { field = static_cast<std::size_t>(to_uint(key, v)); };
        if (key == "mode")
        {
            if (v == "sc")
                c.mode = Mode::SingleCarrier;
            else if (v == "ofdm")
                c.mode = Mode::Ofdm;
            else
                throw ConfigError("mode must be sc or ofdm");
        }
        else if (key == "scheme")
        {
            if (v == "dpsk")
                c.scheme = Scheme::Dpsk;
            else if (v == "dapsk")
                c.scheme = Scheme::Dapsk;
            else if (v == "coherent")
                c.scheme = Scheme::Coherent;
            else
                throw ConfigError("scheme must be dpsk, dapsk or coherent");
        }
        else if (key == "detector")
        {
            static const std::pair<const char *, Detector> names[] = {
                {"ml", Detector::Ml},         {"decoupled", Detector::Decoupled}, {"id", Detector::Id},
                {"multibit", Detector::Multibit}, {"energy", Detector::Energy},   {"vql", Detector::Vql},
                {"coherent", Detector::Coherent}};
            bool ok = false;
            for (const auto &[n, d] : names)
                if (v == n)
                {
                    c.detector = d;
                    ok = true;
                }
            if (!ok)
                throw ConfigError("unknown detector '" + std::string(v) + "'");
        }
        else if (key == "num_rx")
            count(c.num_rx);
        else if (key == "num_tx")
            count(c.num_tx);
        else if (key == "num_uses")
            count(c.num_uses);
        else if (key == "num_symbols")
            count(c.num_symbols);
        else if (key == "block_len")
            count(c.block_len);
        else if (key == "cp_len")
            count(c.cp_len);
        else if (key == "psk_order")
            count(c.psk_order);
        else if (key == "ring_ratio")
            c.ring_ratio = to_double(key, v);
        else if (key == "adc_bits")
            c.adc_bits = static_cast<unsigned>(to_uint(key, v));
        else if (key == "vql_sizes")
        {
            if (v == "none" || v.empty())
                c.vql_sizes.reset();
            else
            {
                const auto parts = split(v, ',');
                if (parts.size() != 3)
                    throw ConfigError("vql_sizes needs three comma-separated group sizes");
                std::array<std::size_t, 3> s{};
                for (std::size_t j = 0; j < 3; ++j)
                    s[j] = static_cast<std::size_t>(to_uint(key, parts[j]));
                c.vql_sizes = s;
            }
        }
        else if (key == "sample_period")
            c.sample_period = to_double(key, v);
        else if (key == "tau_rms")
            c.tau_rms = to_double(key, v);
        else if (key == "doppler_hz")
            c.doppler_hz = to_double(key, v);
        else if (key == "coherence_uses")
            count(c.coherence_uses);
        else if (key == "snr_db")
            c.snr_db = parse_double_list(v);
        else if (key == "trials")
            count(c.trials);
        else if (key == "seed")
            c.seed = to_uint(key, v);
        else if (key == "pilot_fraction")
            c.pilot_fraction = to_double(key, v);
        else if (key == "pilot_len")
            count(c.pilot_len);
        else if (key == "ser_threshold")
            c.ser_threshold = to_double(key, v);
        else if (key == "stop_errors")
            count(c.stop_errors);
        else if (key == "threads")
            count(c.threads);
        else if (key == "batch_size")
            count(c.batch_size);
        else if (key == "phase_detector")
        {
            if (v == "ml")
                c.phase_detector = PhaseDetector::MaximumLikelihood;
            else if (v == "id")
                c.phase_detector = PhaseDetector::InverseDecoding;
            else
                throw ConfigError("phase_detector must be ml or id");
        }
        else if (key == "threshold")
        {
            if (v == "mc")
                c.threshold = ThresholdMode::MonteCarlo;
            else if (v == "analytic")
                c.threshold = ThresholdMode::Analytic;
            else
                throw ConfigError("threshold must be mc or analytic");
        }
        else if (key == "threshold_trials")
            count(c.threshold_trials);
        else if (key == "bussgang_samples")
            count(c.bussgang_samples);
        else if (key == "alpha2")
            c.alpha2 = to_double(key, v);
        else
            throw ConfigError("unknown configuration key " + quoted(key));
    }

    void SimConfig::validate() const
    {
        auto fail = [](const std::string &m) { throw ConfigError(m); };
        if (num_rx == 0 || num_tx == 0 || num_uses == 0 || num_symbols == 0 || block_len == 0)
            fail("antenna, use and block counts must be positive");
        if (trials == 0)
            fail("trials must be at least 1");
        if (batch_size == 0)
            fail("batch_size must be at least 1");
        if (snr_db.empty())
            fail("snr_db must list at least one point");
        for (double s : snr_db)
            if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
                fail("snr_db values must be finite or +inf");
        if (adc_bits > 2)
            fail("adc_bits must be 0 (unquantized), 1 or 2");
        if (psk_order < 2 || (psk_order & (psk_order - 1)) != 0)
            fail("psk_order must be a power of two >= 2");
        if (!(sample_period > 0.0) || !(tau_rms >= 0.0) || !(doppler_hz >= 0.0))
            fail("channel parameters out of range");
        if (!(ser_threshold >= 0.0 && ser_threshold <= 1.0))
            fail("ser_threshold must lie in [0, 1]");
        if (!(alpha2 > 0.0))
            fail("alpha2 must be positive");
        if (bussgang_samples < 100000)
            fail("bussgang_samples must be at least 1e5");
        if (num_uses % block_len != 0)
            fail("num_uses must be a multiple of block_len");
        const std::size_t taps = static_cast<std::size_t>(std::lround(10.0 * tau_rms / sample_period)) + 1;
        if (mode == Mode::Ofdm)
        {
            if (cp_len + 1 < taps)
                fail("cp_len must be at least L - 1 = " + std::to_string(taps - 1));
            if (cp_len > num_uses)
                fail("cp_len must not exceed num_uses");
            if (coherence_uses != 0)
                fail("coherence_uses applies to single-carrier frames only");
        }
        if (vql_sizes && detector != Detector::Vql)
            fail("vql_sizes is only used by the vql detector");

        switch (scheme)
        {
        case Scheme::Dpsk:
            if (num_symbols != 2 || block_len != 2 || num_tx != 2)
                fail("DPSK uses the 2 x 2 Alamouti code: num_tx = num_symbols = block_len = 2");
            if (detector != Detector::Ml && detector != Detector::Decoupled)
                fail("DPSK detectors are ml and decoupled");
            if (detector == Detector::Ml && (adc_bits != 1 || mode != Mode::SingleCarrier))
                fail("the DPSK ML detector needs one-bit quantization and single-carrier mode");
            if (num_uses < 2 * block_len)
                fail("a DPSK frame needs a reference block and at least one data block");
            break;
        case Scheme::Dapsk:
            if (num_tx != 1)
                fail("DAPSK is single-antenna: set num_tx = 1");
            if (mode != Mode::SingleCarrier)
                fail("DAPSK is simulated for single-carrier frames only");
            if (!(ring_ratio > 1.0) || !std::isfinite(ring_ratio))
                fail("ring_ratio must be > 1");
            if (num_uses < 2)
                fail("a DAPSK frame needs a reference symbol and at least one data symbol");
            if (threshold_trials < 10000 && (detector == Detector::Energy || detector == Detector::Vql) &&
                threshold == ThresholdMode::MonteCarlo)
                fail("threshold_trials must be at least 1e4");
            switch (detector)
            {
            case Detector::Ml:
                if (adc_bits != 1)
                    fail("the DAPSK one-bit ML detector needs adc_bits = 1");
                break;
            case Detector::Id:
                break;
            case Detector::Multibit:
                if (adc_bits == 0)
                    fail("the multibit detector needs a quantizer (adc_bits 1 or 2)");
                break;
            case Detector::Energy:
                if (phase_detector == PhaseDetector::MaximumLikelihood && adc_bits == 0)
                    fail("ML phase detection needs a quantizer; use phase_detector = id when unquantized");
                break;
            case Detector::Vql:
                if (adc_bits != 1)
                    fail("the vql detector uses one-bit quantizers (adc_bits = 1)");
                if (!vql_sizes)
                    fail("the vql detector needs vql_sizes");
                if ((*vql_sizes)[0] + (*vql_sizes)[1] + (*vql_sizes)[2] != num_rx)
                    fail("vql_sizes must sum to num_rx");
                if ((*vql_sizes)[1] == 0)
                    fail("the vql sign group (second entry) must not be empty");
                break;
            default:
                fail("DAPSK detectors are ml, id, multibit, energy and vql");
            }
            break;
        case Scheme::Coherent:
            if (num_symbols != 2 || block_len != 2 || num_tx != 2)
                fail("the coherent reference uses the 2 x 2 Alamouti code");
            if (detector != Detector::Ml && detector != Detector::Coherent && detector != Detector::Decoupled)
                fail("coherent detectors are ml (alias coherent) and decoupled");
            if (detector != Detector::Decoupled && (adc_bits == 0 || mode != Mode::SingleCarrier))
                fail("the coherent ML detector needs a quantizer and single-carrier mode");
            if (!(pilot_fraction > 0.0 && pilot_fraction < 1.0))
                fail("pilot_fraction must lie in (0, 1)");
            break;
        }
    }

    SimConfig parse_config(std::string_view text)
    {
        SimConfig c;
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size())
        {
            const auto end = text.find('\n', start);
            std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (!line.empty())
            {
                const auto eq = line.find('=');
                if (eq == std::string_view::npos)
                    throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
                try
                {
                    set_option(c, line.substr(0, eq), line.substr(eq + 1));
                }
                catch (const ConfigError &e)
                {
                    throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
                }
            }
            if (end == std::string_view::npos)
                break;
            start = end + 1;
        }
        c.validate();
        return c;
    }

    SimConfig load_config(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open configuration file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad())
            throw IoError("cannot read configuration file '" + path + "'");
        return parse_config(ss.str());
    }

    std::string format_config(const SimConfig &c)
    {
        std::ostringstream o;
        o << "mode = " << to_string(c.mode) << "\n"
          << "scheme = " << to_string(c.scheme) << "\n"
          << "detector = " << to_string(c.detector) << "\n"
          << "num_rx = " << c.num_rx << "\n"
          << "num_tx = " << c.num_tx << "\n"
          << "num_uses = " << c.num_uses << "\n"
          << "num_symbols = " << c.num_symbols << "\n"
          << "block_len = " << c.block_len << "\n"
          << "cp_len = " << c.cp_len << "\n"
          << "psk_order = " << c.psk_order << "\n"
          << "ring_ratio = " << fmt(c.ring_ratio) << "\n"
          << "adc_bits = " << c.adc_bits << "\n";
        if (c.vql_sizes)
            o << "vql_sizes = " << (*c.vql_sizes)[0] << "," << (*c.vql_sizes)[1] << "," << (*c.vql_sizes)[2] << "\n";
        o << "sample_period = " << fmt(c.sample_period) << "\n"
          << "tau_rms = " << fmt(c.tau_rms) << "\n"
          << "doppler_hz = " << fmt(c.doppler_hz) << "\n"
          << "coherence_uses = " << c.coherence_uses << "\n"
          << "snr_db = ";
        for (std::size_t i = 0; i < c.snr_db.size(); ++i)
            o << (i ? "," : "") << fmt(c.snr_db[i]);
        o << "\n"
          << "trials = " << c.trials << "\n"
          << "seed = " << c.seed << "\n"
          << "pilot_fraction = " << fmt(c.pilot_fraction) << "\n"
          << "pilot_len = " << c.pilot_len << "\n"
          << "ser_threshold = " << fmt(c.ser_threshold) << "\n"
          << "stop_errors = " << c.stop_errors << "\n"
          << "threads = " << c.threads << "\n"
          << "batch_size = " << c.batch_size << "\n"
          << "phase_detector = " << (c.phase_detector == PhaseDetector::MaximumLikelihood ? "ml" : "id") << "\n"
          << "threshold = " << (c.threshold == ThresholdMode::MonteCarlo ? "mc" : "analytic") << "\n"
          << "threshold_trials = " << c.threshold_trials << "\n"
          << "bussgang_samples = " << c.bussgang_samples << "\n"
          << "alpha2 = " << fmt(c.alpha2) << "\n";
        return o.str();
    }
}
