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

#include "qdiff/propagation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qdiff/error.hpp"
#include "qdiff/fft.hpp"

namespace qdiff
{
    PowerDelayProfile exp_pdp(double sample_period, double tau_rms)
    {
        if (!(sample_period > 0.0))
            throw DomainError("exp_pdp: sample period must be positive");
        if (!(tau_rms >= 0.0))
            throw DomainError("exp_pdp: rms delay spread must be non-negative");

        PowerDelayProfile out;
        if (tau_rms == 0.0)
        {
            out.power = {1.0};
            return out;
        }
        out.num_taps = static_cast<std::size_t>(std::lround(10.0 * tau_rms / sample_period)) + 1;
        out.power.resize(out.num_taps);
        for (std::size_t l = 0; l < out.num_taps; ++l)
            out.power[l] = std::exp(-static_cast<double>(l) * sample_period / tau_rms);
        const double total = std::accumulate(out.power.begin(), out.power.end(), 0.0);
        for (double &p : out.power)
            p /= total;
        return out;
    }

    void ChannelSpec::validate() const
    {
        if (!(sample_period > 0.0))
            throw ConfigError("channel: sample period must be positive");
        if (num_taps < 1 || pdp.size() != num_taps)
            throw ConfigError("channel: PDP length must equal the tap count (>= 1)");
        if (num_tx < 1 || num_rx < 1 || num_uses < 1)
            throw ConfigError("channel: antenna and use counts must be positive");
        const double total = std::accumulate(pdp.begin(), pdp.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-12)
            throw ConfigError("channel: PDP must sum to one");
        if (!(doppler_hz >= 0.0))
            throw ConfigError("channel: Doppler must be non-negative");
    }

    ChannelSpec make_channel_spec(double sample_period, double tau_rms, double doppler_hz, std::size_t num_tx,
                                  std::size_t num_rx, std::size_t num_uses)
    {
        const PowerDelayProfile pdp = exp_pdp(sample_period, tau_rms);
        ChannelSpec spec;
        spec.sample_period = sample_period;
        spec.tau_rms = tau_rms;
        spec.num_taps = pdp.num_taps;
        spec.pdp = pdp.power;
        spec.doppler_hz = doppler_hz;
        spec.num_tx = num_tx;
        spec.num_rx = num_rx;
        spec.num_uses = num_uses;
        spec.validate();
        return spec;
    }

    ChannelRealization draw_realization(const ChannelSpec &spec, RandomSource &rng)
    {
        ChannelRealization r;
        r.num_rx = spec.num_rx;
        r.num_tx = spec.num_tx;
        r.num_taps = spec.num_taps;
        r.tap_gains.resize(spec.num_rx * spec.num_tx * spec.num_taps);
        for (cplx &g : r.tap_gains)
            g = complex_gaussian(rng, 1.0);
        r.tap_aoa.resize(spec.num_taps);
        r.tap_doppler.resize(spec.num_taps);
        for (std::size_t l = 0; l < spec.num_taps; ++l)
        {
            r.tap_aoa[l] = pi * (2.0 * rng.uniform() - 1.0);
            r.tap_doppler[l] = spec.doppler_hz * std::cos(r.tap_aoa[l]);
        }
        return r;
    }

    namespace
    {
        void check_realization(const ChannelSpec &spec, const ChannelRealization &real)
        {
            if (real.num_rx != spec.num_rx || real.num_tx != spec.num_tx || real.num_taps != spec.num_taps)
                throw ShapeError("channel realization does not match its spec");
        }

        // Tap rotation at (possibly negative) sample index n.
        cplx doppler_phase(const ChannelSpec &spec, const ChannelRealization &real, std::size_t l, double n)
        {
            return std::polar(1.0, 2.0 * pi * real.tap_doppler[l] * spec.sample_period * n);
        }
    }

    TapGains channel_at_use(const ChannelSpec &spec, const ChannelRealization &real, std::size_t n)
    {
        check_realization(spec, real);
        if (n >= spec.num_uses)
            throw IndexError("channel_at_use: use index " + std::to_string(n) + " out of range");
        TapGains h{spec.num_rx, spec.num_tx, spec.num_taps, std::vector<cplx>(real.tap_gains.size())};
        for (std::size_t l = 0; l < spec.num_taps; ++l)
        {
            const cplx rot = std::sqrt(spec.pdp[l]) * doppler_phase(spec, real, l, static_cast<double>(n));
            for (std::size_t u = 0; u < spec.num_rx; ++u)
                for (std::size_t k = 0; k < spec.num_tx; ++k)
                    h.data[(u * spec.num_tx + k) * spec.num_taps + l] = rot * real.gain(u, k, l);
        }
        return h;
    }

    CMatrix freq_response(const ChannelSpec &spec, const ChannelRealization &real, std::size_t v)
    {
        check_realization(spec, real);
        if (v >= spec.num_uses)
            throw IndexError("freq_response: index " + std::to_string(v) + " out of range");
        const double n_uses = static_cast<double>(spec.num_uses);
        std::vector<cplx> kernel(spec.num_taps);
        for (std::size_t l = 0; l < spec.num_taps; ++l)
        {
            // reduce l*v mod N first so the phase stays exact for large products
            const double m = static_cast<double>((l * v) % spec.num_uses);
            kernel[l] = std::sqrt(spec.pdp[l]) * std::polar(1.0, -2.0 * pi * m / n_uses);
        }
        CMatrix h(spec.num_rx, spec.num_tx);
        for (std::size_t u = 0; u < spec.num_rx; ++u)
            for (std::size_t k = 0; k < spec.num_tx; ++k)
            {
                cplx acc = 0.0;
                for (std::size_t l = 0; l < spec.num_taps; ++l)
                    acc += kernel[l] * real.gain(u, k, l);
                h(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) = acc;
            }
        return h;
    }

    CVector ofdm_modulate(const CVector &freq_symbols, std::size_t cp_len, std::size_t num_taps)
    {
        if (num_taps >= 1 && cp_len + 1 < num_taps)
            throw ConfigError("ofdm_modulate: cyclic prefix shorter than the channel memory");
        const auto n = static_cast<std::size_t>(freq_symbols.size());
        if (cp_len > n)
            throw ConfigError("ofdm_modulate: cyclic prefix longer than the symbol");
        std::vector<cplx> time(n);
        unitary_dft(std::span<const cplx>(freq_symbols.data(), n), time, true);
        CVector out(static_cast<Eigen::Index>(n + cp_len));
        for (std::size_t i = 0; i < cp_len; ++i)
            out(static_cast<Eigen::Index>(i)) = time[n - cp_len + i];
        for (std::size_t i = 0; i < n; ++i)
            out(static_cast<Eigen::Index>(cp_len + i)) = time[i];
        return out;
    }

    CVector ofdm_demodulate(const CVector &time_samples, std::size_t cp_len)
    {
        const auto total = static_cast<std::size_t>(time_samples.size());
        if (cp_len > total)
            throw ShapeError("ofdm_demodulate: frame shorter than the cyclic prefix");
        const std::size_t n = total - cp_len;
        CVector out(static_cast<Eigen::Index>(n));
        unitary_dft(std::span<const cplx>(time_samples.data() + cp_len, n), std::span<cplx>(out.data(), n), false);
        return out;
    }

    namespace
    {
        void add_noise(CMatrix &Y, double noise_var, RandomSource &rng)
        {
            if (noise_var < 0.0)
                throw DomainError("receive_frame: noise variance must be non-negative");
            if (noise_var == 0.0)
                return;
            for (Eigen::Index n = 0; n < Y.cols(); ++n)
                for (Eigen::Index u = 0; u < Y.rows(); ++u)
                    Y(u, n) += complex_gaussian(rng, noise_var);
        }

        // y_u[n] += sum_k H_{u,k}[n] x_k[n] for n in [first, first + count)
        void apply_flat_sc(const ChannelSpec &spec, const ChannelRealization &real, const CMatrix &X,
                           std::size_t first, std::size_t count, CMatrix &Y)
        {
            const std::size_t U = spec.num_rx, K = spec.num_tx, L = spec.num_taps, N = spec.num_uses;
            std::vector<cplx> kernel(L);
            for (std::size_t n = first; n < first + count; ++n)
            {
                for (std::size_t l = 0; l < L; ++l)
                    kernel[l] = std::sqrt(spec.pdp[l]) *
                                std::polar(1.0, -2.0 * pi * static_cast<double>((l * n) % N) / static_cast<double>(N));
                const auto col = static_cast<Eigen::Index>(n);
                for (std::size_t u = 0; u < U; ++u)
                {
                    cplx acc = 0.0;
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        cplx h = 0.0;
                        const cplx *g = &real.tap_gains[(u * K + k) * L];
                        for (std::size_t l = 0; l < L; ++l)
                            h += kernel[l] * g[l];
                        acc += h * X(static_cast<Eigen::Index>(k), col);
                    }
                    Y(static_cast<Eigen::Index>(u), col) += acc;
                }
            }
        }
    }

    CMatrix receive_frame(const ChannelSpec &spec, const ChannelRealization &real, const CMatrix &X,
                          double noise_var, RandomSource &rng, const FrameLayout &layout)
    {
        check_realization(spec, real);
        if (static_cast<std::size_t>(X.rows()) != spec.num_tx)
            throw ShapeError("receive_frame: transmit matrix must have K rows");
        const std::size_t U = spec.num_rx, K = spec.num_tx, L = spec.num_taps;

        if (layout.mode == Mode::SingleCarrier)
        {
            if (static_cast<std::size_t>(X.cols()) != spec.num_uses)
                throw ShapeError("receive_frame: SC frame must span N uses");
            CMatrix Y = CMatrix::Zero(static_cast<Eigen::Index>(U), X.cols());
            apply_flat_sc(spec, real, X, 0, spec.num_uses, Y);
            add_noise(Y, noise_var, rng);
            return Y;
        }

        if (static_cast<std::size_t>(X.cols()) != spec.num_uses + layout.cp_len)
            throw ShapeError("receive_frame: OFDM frame must span N + N_cp samples");
        if (layout.cp_len + 1 < L)
            throw ConfigError("receive_frame: cyclic prefix shorter than the channel memory");
        const auto total = static_cast<std::size_t>(X.cols());
        CMatrix Y = CMatrix::Zero(static_cast<Eigen::Index>(U), X.cols());
        std::vector<cplx> taps(L);
        for (std::size_t m = 0; m < total; ++m)
        {
            const double n = static_cast<double>(m) - static_cast<double>(layout.cp_len);
            for (std::size_t l = 0; l < L; ++l)
                taps[l] = std::sqrt(spec.pdp[l]) * doppler_phase(spec, real, l, n);
            const std::size_t lmax = std::min(L, m + 1);
            for (std::size_t u = 0; u < U; ++u)
            {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < K; ++k)
                {
                    const cplx *g = &real.tap_gains[(u * K + k) * L];
                    for (std::size_t l = 0; l < lmax; ++l)
                        acc += taps[l] * g[l] * X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m - l));
                }
                Y(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(m)) = acc;
            }
        }
        add_noise(Y, noise_var, rng);
        return Y;
    }

    CMatrix receive_frame_segmented(const ChannelSpec &spec, std::span<const ChannelRealization> segments,
                                    std::size_t coherence_uses, const CMatrix &X, double noise_var, RandomSource &rng)
    {
        if (static_cast<std::size_t>(X.rows()) != spec.num_tx || static_cast<std::size_t>(X.cols()) != spec.num_uses)
            throw ShapeError("receive_frame_segmented: transmit matrix must be K x N");
        if (coherence_uses == 0)
            throw ConfigError("receive_frame_segmented: coherence length must be positive");
        const std::size_t needed = (spec.num_uses + coherence_uses - 1) / coherence_uses;
        if (segments.size() < needed)
            throw ShapeError("receive_frame_segmented: not enough channel realizations");
        CMatrix Y = CMatrix::Zero(static_cast<Eigen::Index>(spec.num_rx), X.cols());
        for (std::size_t i = 0; i < needed; ++i)
        {
            check_realization(spec, segments[i]);
            const std::size_t first = i * coherence_uses;
            apply_flat_sc(spec, segments[i], X, first, std::min(coherence_uses, spec.num_uses - first), Y);
        }
        add_noise(Y, noise_var, rng);
        return Y;
    }

    std::vector<CVector> group_blocks(std::span<const cplx> y, std::size_t block_len)
    {
        if (block_len == 0 || y.size() % block_len != 0)
            throw ConfigError("group_blocks: sequence length must be a multiple of the block length");
        std::vector<CVector> blocks;
        blocks.reserve(y.size() / block_len);
        for (std::size_t b = 0; b < y.size(); b += block_len)
            blocks.emplace_back(Eigen::Map<const CVector>(y.data() + b, static_cast<Eigen::Index>(block_len)));
        return blocks;
    }
}
