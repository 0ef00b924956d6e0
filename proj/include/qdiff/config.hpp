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

#ifndef QDIFF_CONFIG_HPP
#define QDIFF_CONFIG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdiff/detect_dapsk.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    enum class Scheme
    {
        Dpsk,
        Dapsk,
        Coherent
    };

    enum class Detector
    {
        Ml,        // one-bit ML (DPSK, DAPSK) or coherent ML
        Decoupled, // matched-combining DPSK / coherent detector
        Id,        // DAPSK inverse decoding
        Multibit,  // DAPSK bin-probability ML
        Energy,    // DAPSK energy amplitude detector
        Vql,       // DAPSK variable quantization levels
        Coherent   // alias of Ml for the coherent scheme
    };

    enum class ThresholdMode
    {
        MonteCarlo,
        Analytic
    };

    /// Simulation parameters. Field names match the keys of the configuration file.
    struct SimConfig
    {
        Mode mode = Mode::SingleCarrier;
        Scheme scheme = Scheme::Dpsk;
        Detector detector = Detector::Decoupled;

        std::size_t num_rx = 64;     // U
        std::size_t num_tx = 2;      // K
        std::size_t num_uses = 256;  // N
        std::size_t num_symbols = 2; // N_s
        std::size_t block_len = 2;   // N_d
        std::size_t cp_len = 32;     // N_cp
        std::size_t psk_order = 8;   // M
        double ring_ratio = 2.0;     // a
        unsigned adc_bits = 1;       // q_b, 0 = unquantized
        std::optional<std::array<std::size_t, 3>> vql_sizes;

        double sample_period = 50e-9;
        double tau_rms = 0.0;
        double doppler_hz = 0.0;
        std::size_t coherence_uses = 0; // SC block-fading refresh, 0 = one realization per frame

        std::vector<double> snr_db{0.0};
        std::size_t trials = 1000;
        std::uint64_t seed = 1;
        double pilot_fraction = 0.125; // xi
        std::size_t pilot_len = 0;     // 0 = one preamble per coherence span
        double ser_threshold = 0.05;
        std::size_t stop_errors = 0; // stop a point once this many bit errors are seen, 0 = never
        std::size_t threads = 0;     // 0 = hardware concurrency
        std::size_t batch_size = 64;

        PhaseDetector phase_detector = PhaseDetector::MaximumLikelihood;
        ThresholdMode threshold = ThresholdMode::MonteCarlo;
        std::size_t threshold_trials = 10000;
        std::size_t bussgang_samples = 1000000;
        double alpha2 = 1.0;

        /// Throws ConfigError describing the first inconsistency.
        void validate() const;
    };

    /// Applies one key = value setting. Throws ConfigError for unknown keys or malformed values.
    void set_option(SimConfig &cfg, std::string_view key, std::string_view value);

    /// Parses "key = value" lines; '#' starts a comment. The result is validated.
    SimConfig parse_config(std::string_view text);

    /// Reads and parses a file. Throws IoError if it cannot be read.
    SimConfig load_config(const std::string &path);

    /// Canonical text form; parse_config(format_config(c)) reproduces c.
    std::string format_config(const SimConfig &cfg);

    /// "0,5,10" or "start:step:stop" (inclusive). "inf" is accepted.
    std::vector<double> parse_double_list(std::string_view text);

    std::string to_string(Scheme s);
    std::string to_string(Detector d);
    std::string to_string(Mode m);
}

#endif
