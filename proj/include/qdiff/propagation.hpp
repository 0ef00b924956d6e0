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

#ifndef QDIFF_PROPAGATION_HPP
#define QDIFF_PROPAGATION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "qdiff/statmath.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    struct PowerDelayProfile
    {
        std::size_t num_taps = 1;
        std::vector<double> power; // sums to one
    };

    /// Exponential PDP p[l] ~ exp(-l Ts / tau_rms), truncated at L = round(10 tau_rms / Ts) + 1 taps.
    PowerDelayProfile exp_pdp(double sample_period, double tau_rms);

    struct ChannelSpec
    {
        double sample_period = 50e-9; // Ts [s]
        double tau_rms = 0.0;         // [s]
        std::size_t num_taps = 1;     // L
        std::vector<double> pdp{1.0}; // p[0..L-1]
        double doppler_hz = 0.0;      // maximum Doppler f_d
        std::size_t num_tx = 1;       // K
        std::size_t num_rx = 1;       // U
        std::size_t num_uses = 1;     // N

        void validate() const;
    };

    /// Builds a validated spec with an exponential PDP.
    ChannelSpec make_channel_spec(double sample_period, double tau_rms, double doppler_hz, std::size_t num_tx,
                                  std::size_t num_rx, std::size_t num_uses);

    /// One draw of the multipath channel. Immutable once created.
    struct ChannelRealization
    {
        std::size_t num_rx = 0, num_tx = 0, num_taps = 0;
        std::vector<cplx> tap_gains;     // g[u][k][l], CN(0,1), index (u * K + k) * L + l
        std::vector<double> tap_doppler; // f_l = f_d cos(theta_l) [Hz]
        std::vector<double> tap_aoa;     // theta_l, uniform on [-pi, pi]

        cplx gain(std::size_t u, std::size_t k, std::size_t l) const { return tap_gains[(u * num_tx + k) * num_taps + l]; }
    };

    ChannelRealization draw_realization(const ChannelSpec &spec, RandomSource &rng);

    /// Per-tap gains h[u][k][l] at one sample instant.
    struct TapGains
    {
        std::size_t num_rx = 0, num_tx = 0, num_taps = 0;
        std::vector<cplx> data;
        cplx operator()(std::size_t u, std::size_t k, std::size_t l) const { return data[(u * num_tx + k) * num_taps + l]; }
    };

    /// h[n, l] = sqrt(p[l]) g[l] exp(j 2 pi nu_l n / N) with the normalised Doppler nu_l = f_l N Ts,
    /// i.e. the tap rotates by 2 pi f_l Ts per sample. Throws IndexError unless 0 <= n < N.
    TapGains channel_at_use(const ChannelSpec &spec, const ChannelRealization &real, std::size_t n);

    /// h[u][k] at subcarrier / use v: sum_l sqrt(p[l]) g[l] exp(-j 2 pi l v / N). U x K.
    CMatrix freq_response(const ChannelSpec &spec, const ChannelRealization &real, std::size_t v);

    /// IDFT plus cyclic prefix; output length N + cp_len with the prefix first.
    /// Throws ConfigError if cp_len < num_taps - 1.
    CVector ofdm_modulate(const CVector &freq_symbols, std::size_t cp_len, std::size_t num_taps = 1);

    /// Drops the prefix and applies the unitary DFT.
    CVector ofdm_demodulate(const CVector &time_samples, std::size_t cp_len);

    struct FrameLayout
    {
        Mode mode = Mode::SingleCarrier;
        std::size_t cp_len = 0; // OFDM only
    };

    /// Received frame Y (U x frame length) for transmit matrix X (K x frame length).
    ///
    /// SC: y_u[n] = sum_k h_{u,k}[n] x_k[n] + z_u[n] with h[n] the frequency response at index n.
    /// OFDM: X holds time samples with the prefix; the taps are convolved sample by sample with their
    /// Doppler rotation, so inter-carrier interference is retained. Samples before the frame are zero.
    /// noise_var == 0 disables the noise.
    CMatrix receive_frame(const ChannelSpec &spec, const ChannelRealization &real, const CMatrix &X,
                          double noise_var, RandomSource &rng, const FrameLayout &layout = {});

    /// SC variant with block-fading refresh: realisation i covers uses [i * coherence_uses, (i + 1) * coherence_uses).
    CMatrix receive_frame_segmented(const ChannelSpec &spec, std::span<const ChannelRealization> segments,
                                    std::size_t coherence_uses, const CMatrix &X, double noise_var, RandomSource &rng);

    /// Splits one antenna's sequence into consecutive length-N_d blocks.
    std::vector<CVector> group_blocks(std::span<const cplx> y, std::size_t block_len);
}

#endif
