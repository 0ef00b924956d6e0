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

#ifndef QDIFF_SIMULATE_HPP
#define QDIFF_SIMULATE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdiff/coherent.hpp"
#include "qdiff/config.hpp"
#include "qdiff/detect_dapsk.hpp"
#include "qdiff/detect_dpsk.hpp"
#include "qdiff/diffcode.hpp"
#include "qdiff/propagation.hpp"
#include "qdiff/quantize.hpp"

namespace qdiff
{
    struct TrialCounts
    {
        std::uint64_t bit_errors = 0, bits = 0;
        std::uint64_t symbol_errors = 0, symbols = 0;
        std::uint64_t amp_bit_errors = 0, amp_bits = 0; // DAPSK ring bit b1
        std::uint64_t erasures = 0;

        TrialCounts &operator+=(const TrialCounts &o);
        bool operator==(const TrialCounts &o) const = default;
    };

    struct MetricRecord
    {
        double snr_db = 0.0;
        std::uint64_t trials = 0;
        std::uint64_t seed = 0;
        TrialCounts counts;
        double ber = 0.0, ser = 0.0, amp_ber = 0.0;
        double spectral_efficiency = 0.0;
        double wall_time = 0.0; // seconds, not part of the CSV
    };

    /// Derived per-SNR quantities.
    struct OperatingPoint
    {
        double snr_db = 0.0;
        double noise_var = 0.0;     // sigma_z^2 before gain control
        double agc_gain = 1.0;      // 1 / sqrt(1 + sigma_z^2)
        double agc_noise_var = 0.0; // sigma_z^2 after gain control
        double rho = 0.0;           // DPSK / coherent likelihood SNR
        std::array<double, 3> rho_set{};
        EnergyModel energy;
        double gamma = 0.0; // energy threshold (energy / vql detectors)
    };

    /// Information bits per symbol (log2 M, plus the ring bit for DAPSK).
    unsigned bits_per_symbol(const SimConfig &cfg);
    /// Fraction of uses carrying data: 1 - xi (coherent), (N - N_d) / N (DPSK), (N - 1) / N (DAPSK).
    double data_fraction(const SimConfig &cfg);
    /// Uses over which the channel is roughly constant: N Ts / (2 pi tau_rms) (the SC response drifts from use
    /// to use, the OFDM one across subcarriers), capped by N and by the SC block-fading refresh.
    double coherence_span(const SimConfig &cfg);
    /// Pilot uses per pilot block: cfg.pilot_len if set, else xi times the longest pilot block that tiles the
    /// frame inside coherence_span (the shortest valid block if none does).
    std::size_t default_pilot_len(const SimConfig &cfg);
    /// xi_data N N_b (1 - ser) if ser <= threshold, else 0.
    double spectral_efficiency(double ser, const SimConfig &cfg);

    /// Monte-Carlo engine for one configuration. Construction validates the configuration and calibrates the
    /// quantizers; all members are const and safe to call from several threads.
    class Simulator
    {
    public:
        explicit Simulator(SimConfig cfg);

        const SimConfig &config() const { return cfg_; }
        const ChannelSpec &channel() const { return chan_; }
        const QuantizerSpec &quantizer() const { return quant_; }
        const VqlPartition *partition() const { return vql_ ? &*vql_ : nullptr; }

        /// with_threshold = false skips the energy threshold (gamma stays 0).
        OperatingPoint prepare(double snr_db, bool with_threshold = true) const;

        /// One frame; fully determined by (seed, trial).
        TrialCounts run_trial(const OperatingPoint &op, std::uint64_t trial) const;

        /// Runs config().trials frames (or fewer with early stopping) at one SNR.
        MetricRecord run_point(double snr_db) const;

        /// One record per SNR point in ascending order.
        std::vector<MetricRecord> sweep() const;

        /// Energy statistics under the inner / outer ring for `trials` independent draws.
        void energy_samples(const OperatingPoint &op, std::size_t trials, std::uint64_t seed, std::vector<double> &low,
                            std::vector<double> &high) const;
        double threshold_mc(const OperatingPoint &op, std::size_t trials, std::uint64_t seed) const;
        double threshold_analytic(const OperatingPoint &op) const;

        /// Human-readable summary of derived quantities.
        std::string describe() const;

    private:
        CMatrix receive_quantized(const CMatrix &frame, const OperatingPoint &op, RandomSource &rng) const;
        TrialCounts trial_dpsk(const OperatingPoint &op, RandomSource &rng) const;
        TrialCounts trial_dapsk(const OperatingPoint &op, RandomSource &rng) const;
        TrialCounts trial_coherent(const OperatingPoint &op, RandomSource &rng) const;

        SimConfig cfg_;
        ChannelSpec chan_;
        QuantizerSpec quant_;
        std::optional<VqlPartition> vql_;
        std::optional<DpskDetector> dpsk_;
        std::optional<PilotPlan> plan_;
        PskConstellation psk_;
        DapskState dapsk0_;
    };

    std::vector<MetricRecord> sweep(const SimConfig &cfg);

    /// Header "snr_db,ber,ser,spectral_efficiency,bits,trials,seed", doubles as %.17g.
    std::string format_csv(const std::vector<MetricRecord> &records);
    /// Throws IoError with the path on failure.
    void write_csv(const std::vector<MetricRecord> &records, const std::string &path);

    struct ThresholdRow
    {
        std::size_t num_rx = 0;
        double snr_db = 0.0;
        double gamma_mc = 0.0;
        double gamma_analytic = 0.0;
    };

    /// gamma vs U and SNR for the configured DAPSK quantizer. VQL groups are split into equal thirds, any
    /// remainder going to the sign group.
    std::vector<ThresholdRow> threshold_table(const SimConfig &cfg, const std::vector<std::size_t> &num_rx,
                                              const std::vector<double> &snr_db);
    std::string format_threshold_csv(const std::vector<ThresholdRow> &rows);
}

#endif
