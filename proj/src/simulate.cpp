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

#include "qdiff/simulate.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "qdiff/error.hpp"

namespace qdiff
{
    namespace
    {
        constexpr double rho_cap = 1e12;
        constexpr std::uint64_t calibration_stream = std::uint64_t{1} << 62;
        constexpr std::uint64_t threshold_stream = std::uint64_t{1} << 63;

        double capped_inverse(double v) { return v > 1.0 / rho_cap ? 1.0 / v : rho_cap; }

        unsigned draw_label(RandomSource &rng, unsigned bits)
        {
            return static_cast<unsigned>(rng() >> (64 - bits));
        }

        std::uint64_t bit_diff(unsigned a, unsigned b) { return static_cast<std::uint64_t>(std::popcount(a ^ b)); }

        std::string fmt(double v)
        {
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }
    }

    TrialCounts &TrialCounts::operator+=(const TrialCounts &o)
    {
        bit_errors += o.bit_errors;
        bits += o.bits;
        symbol_errors += o.symbol_errors;
        symbols += o.symbols;
        amp_bit_errors += o.amp_bit_errors;
        amp_bits += o.amp_bits;
        erasures += o.erasures;
        return *this;
    }

    unsigned bits_per_symbol(const SimConfig &cfg)
    {
        const auto m = static_cast<unsigned>(std::countr_zero(cfg.psk_order));
        return cfg.scheme == Scheme::Dapsk ? m + 1 : m;
    }

    double coherence_span(const SimConfig &cfg)
    {
        double span = static_cast<double>(cfg.num_uses);
        if (cfg.tau_rms > 0.0)
            span = std::min(span, static_cast<double>(cfg.num_uses) * cfg.sample_period / (2.0 * pi * cfg.tau_rms));
        if (cfg.mode == Mode::SingleCarrier && cfg.coherence_uses > 0)
            span = std::min(span, static_cast<double>(cfg.coherence_uses));
        return span;
    }

    std::size_t default_pilot_len(const SimConfig &cfg)
    {
        if (cfg.pilot_len)
            return cfg.pilot_len;
        // largest tiling block within the coherence span, else the shortest one that fits K pilots
        std::size_t best = 0, shortest = 0;
        const double span = coherence_span(cfg);
        for (std::size_t b = 1; b <= cfg.num_uses; ++b)
        {
            if (cfg.num_uses % b != 0)
                continue;
            const auto P = static_cast<std::size_t>(std::lround(cfg.pilot_fraction * static_cast<double>(b)));
            if (P < cfg.num_tx || P % cfg.num_tx != 0 || P >= b || (b - P) % cfg.block_len != 0 ||
                static_cast<std::size_t>(std::lround(static_cast<double>(P) / cfg.pilot_fraction)) != b)
                continue;
            if (!shortest)
                shortest = P;
            if (static_cast<double>(b) <= span)
                best = P;
        }
        if (best)
            return best;
        return shortest ? shortest : cfg.num_tx;
    }

    double data_fraction(const SimConfig &cfg)
    {
        const auto n = static_cast<double>(cfg.num_uses);
        switch (cfg.scheme)
        {
        case Scheme::Coherent: return 1.0 - cfg.pilot_fraction;
        case Scheme::Dpsk: return (n - static_cast<double>(cfg.block_len)) / n;
        case Scheme::Dapsk: return (n - 1.0) / n;
        }
        return 0.0;
    }

    double spectral_efficiency(double ser, const SimConfig &cfg)
    {
        if (!(ser >= 0.0 && ser <= 1.0))
            throw DomainError("spectral_efficiency: ser must lie in [0, 1]");
        if (ser > cfg.ser_threshold)
            return 0.0;
        return data_fraction(cfg) * static_cast<double>(cfg.num_uses) * bits_per_symbol(cfg) * (1.0 - ser);
    }

    Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg))
    {
        cfg_.validate();
        chan_ = make_channel_spec(cfg_.sample_period, cfg_.tau_rms, cfg_.doppler_hz, cfg_.num_tx, cfg_.num_rx,
                                  cfg_.num_uses);
        psk_ = make_psk(cfg_.psk_order);

        RandomSource cal(cfg_.seed, calibration_stream);
        switch (cfg_.adc_bits)
        {
        case 0: quant_ = passthrough_spec(); break;
        case 1: quant_ = calibrated(one_bit_spec(), 1.0, cal, cfg_.bussgang_samples); break;
        default: quant_ = calibrated(dapsk_two_bit_spec(cfg_.ring_ratio), 1.0, cal, cfg_.bussgang_samples); break;
        }
        if (cfg_.detector == Detector::Vql)
        {
            vql_ = vql_partition(cfg_.num_rx, cfg_.ring_ratio, *cfg_.vql_sizes);
            for (std::size_t j = 0; j < 3; ++j)
            {
                RandomSource r(cfg_.seed, calibration_stream + 1 + j);
                vql_->specs[j] = calibrated(vql_->specs[j], 1.0, r, cfg_.bussgang_samples);
            }
        }
        if (cfg_.scheme != Scheme::Dapsk)
            dpsk_.emplace(alamouti_dispersion(), psk_);
        if (cfg_.scheme == Scheme::Coherent)
            plan_ = make_pilot_plan(cfg_.num_uses, cfg_.num_tx, cfg_.pilot_fraction, default_pilot_len(cfg_),
                                    cfg_.block_len);
        if (cfg_.scheme == Scheme::Dapsk)
            dapsk0_ = dapsk_initial_state(cfg_.ring_ratio);
    }

    OperatingPoint Simulator::prepare(double snr_db, bool with_threshold) const
    {
        OperatingPoint op;
        op.snr_db = snr_db;
        op.noise_var = std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);
        op.agc_gain = 1.0 / std::sqrt(1.0 + op.noise_var);
        op.agc_noise_var = op.noise_var * op.agc_gain * op.agc_gain;

        const double eta = quant_.eta, eps = quant_.noise_var;
        const double composite = eta * eta * op.agc_noise_var + eps;
        op.rho = cfg_.scheme == Scheme::Coherent ? capped_inverse(composite) : capped_inverse(2.0 * composite);
        if (composite > 0.0)
            op.rho_set = dapsk_rho_set(eta, op.agc_noise_var, eps, cfg_.ring_ratio);
        else
            op.rho_set = {rho_cap, rho_cap, rho_cap};
        for (double &r : op.rho_set)
            r = std::min(r, rho_cap);

        op.energy.alpha2 = cfg_.alpha2 * op.agc_gain * op.agc_gain;
        op.energy.num_rx = cfg_.num_rx;
        op.energy.psi0 = dapsk0_.psi0;
        op.energy.psi1 = dapsk0_.psi1;
        if (vql_)
        {
            double eta2 = 0.0, noise = 0.0;
            for (std::size_t j = 0; j < 3; ++j)
            {
                const double w = static_cast<double>(vql_->sizes[j]) / static_cast<double>(cfg_.num_rx);
                const QuantizerSpec &s = vql_->specs[j];
                eta2 += w * s.eta * s.eta;
                noise += w * (s.eta * s.eta * op.agc_noise_var + s.noise_var);
            }
            op.energy.eta = std::sqrt(eta2);
            op.energy.composite_noise = noise;
        }
        else
        {
            op.energy.eta = eta;
            op.energy.composite_noise = composite;
        }

        if (with_threshold && cfg_.scheme == Scheme::Dapsk &&
            (cfg_.detector == Detector::Energy || cfg_.detector == Detector::Vql))
            op.gamma = cfg_.threshold == ThresholdMode::MonteCarlo
                           ? threshold_mc(op, cfg_.threshold_trials, cfg_.seed)
                           : threshold_analytic(op);
        return op;
    }

    CMatrix Simulator::receive_quantized(const CMatrix &frame, const OperatingPoint &op, RandomSource &rng) const
    {
        const std::size_t U = cfg_.num_rx, N = cfg_.num_uses;
        CMatrix Y;
        if (cfg_.mode == Mode::SingleCarrier)
        {
            if (cfg_.coherence_uses == 0 || cfg_.coherence_uses >= N)
            {
                const ChannelRealization real = draw_realization(chan_, rng);
                Y = receive_frame(chan_, real, frame, op.noise_var, rng);
            }
            else
            {
                std::vector<ChannelRealization> segs;
                for (std::size_t i = 0; i * cfg_.coherence_uses < N; ++i)
                    segs.push_back(draw_realization(chan_, rng));
                Y = receive_frame_segmented(chan_, segs, cfg_.coherence_uses, frame, op.noise_var, rng);
            }
        }
        else
        {
            const ChannelRealization real = draw_realization(chan_, rng);
            CMatrix Xt(frame.rows(), static_cast<Eigen::Index>(N + cfg_.cp_len));
            for (Eigen::Index k = 0; k < frame.rows(); ++k)
                Xt.row(k) = ofdm_modulate(frame.row(k).transpose(), cfg_.cp_len, chan_.num_taps).transpose();
            Y = receive_frame(chan_, real, Xt, op.noise_var, rng, {Mode::Ofdm, cfg_.cp_len});
        }

        CMatrix Q(Y.rows(), Y.cols());
        for (Eigen::Index u = 0; u < Y.rows(); ++u)
        {
            const QuantizerSpec &spec = vql_ ? vql_->spec_for(static_cast<std::size_t>(u)) : quant_;
            for (Eigen::Index n = 0; n < Y.cols(); ++n)
                Q(u, n) = quantize_complex(op.agc_gain * Y(u, n), spec);
        }
        if (cfg_.mode == Mode::SingleCarrier)
            return Q;

        CMatrix F(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(N));
        for (Eigen::Index u = 0; u < Q.rows(); ++u)
            F.row(u) = ofdm_demodulate(Q.row(u).transpose(), cfg_.cp_len).transpose();
        return F;
    }

    TrialCounts Simulator::trial_dpsk(const OperatingPoint &op, RandomSource &rng) const
    {
        const DispersionSet &disp = dpsk_->dispersion();
        const std::size_t nd = disp.block_len, ns = disp.num_symbols, blocks = cfg_.num_uses / nd;
        const auto nsi = static_cast<Eigen::Index>(ns);
        std::vector<unsigned> labels(ns * blocks, psk_.labels[0]);
        CMatrix symbols(nsi, static_cast<Eigen::Index>(blocks));
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t n = 0; n < ns; ++n)
            {
                // block 0 is the reference (symbol index 0)
                if (b > 0)
                    labels[b * ns + n] = draw_label(rng, psk_.bits);
                symbols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b)) =
                    psk_.point_of_label(labels[b * ns + n]);
            }
        const CMatrix C = diff_encode(symbols, disp);
        const CMatrix Q = receive_quantized(C, op, rng);

        TrialCounts t;
        const auto ndi = static_cast<Eigen::Index>(nd);
        QuantizedBlockPair pair;
        pair.rho = op.rho;
        for (std::size_t b = 1; b < blocks; ++b)
        {
            pair.q_prev = Q.middleCols(static_cast<Eigen::Index>(b - 1) * ndi, ndi);
            pair.q_curr = Q.middleCols(static_cast<Eigen::Index>(b) * ndi, ndi);
            const auto hat = cfg_.detector == Detector::Ml ? dpsk_->ml_one_bit(pair) : dpsk_->decoupled(pair);
            for (std::size_t n = 0; n < ns; ++n)
            {
                const unsigned tx = labels[b * ns + n], rx = psk_.labels[hat[n]];
                t.bit_errors += bit_diff(tx, rx);
                t.symbol_errors += tx != rx;
            }
        }
        t.symbols = (blocks - 1) * ns;
        t.bits = t.symbols * psk_.bits;
        return t;
    }

    TrialCounts Simulator::trial_coherent(const OperatingPoint &op, RandomSource &rng) const
    {
        const DispersionSet &disp = dpsk_->dispersion();
        const PilotPlan &plan = *plan_;
        const std::size_t ns = disp.num_symbols, nd = disp.block_len;
        const std::size_t blocks = coherent_data_blocks(plan, disp);
        std::vector<unsigned> labels(ns * blocks);
        CMatrix symbols(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(blocks));
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t n = 0; n < ns; ++n)
            {
                labels[b * ns + n] = draw_label(rng, psk_.bits);
                symbols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b)) =
                    psk_.point_of_label(labels[b * ns + n]);
            }
        const CMatrix X = coherent_frame(symbols, plan, disp);
        const CMatrix Q = receive_quantized(X, op, rng);

        TrialCounts t;
        const std::size_t per_block = plan.data_len() / nd;
        QuantizedBlockPair pair;
        pair.rho = op.rho;
        std::size_t blk = 0;
        for (std::size_t pb = 0; pb < plan.num_blocks(); ++pb)
        {
            const auto start = static_cast<Eigen::Index>(pb * plan.block_len);
            pair.q_prev = ls_channel_estimate(Q.middleCols(start, static_cast<Eigen::Index>(plan.pilot_len)),
                                              plan.pilot_symbols);
            for (std::size_t d = 0; d < per_block; ++d, ++blk)
            {
                const auto col = start + static_cast<Eigen::Index>(plan.pilot_len + d * nd);
                pair.q_curr = Q.middleCols(col, static_cast<Eigen::Index>(nd));
                std::vector<std::size_t> hat;
                if (cfg_.detector == Detector::Decoupled)
                    hat = dpsk_->decoupled(pair);
                else if (cfg_.adc_bits == 1)
                    hat = dpsk_->ml_one_bit(pair);
                else
                    hat = dpsk_->bin_ml(pair, quant_);
                for (std::size_t n = 0; n < ns; ++n)
                {
                    const unsigned tx = labels[blk * ns + n], rx = psk_.labels[hat[n]];
                    t.bit_errors += bit_diff(tx, rx);
                    t.symbol_errors += tx != rx;
                }
            }
        }
        t.symbols = blocks * ns;
        t.bits = t.symbols * psk_.bits;
        return t;
    }

    TrialCounts Simulator::trial_dapsk(const OperatingPoint &op, RandomSource &rng) const
    {
        const std::size_t N = cfg_.num_uses;
        const double a = cfg_.ring_ratio, psi0 = dapsk0_.psi0, psi1 = dapsk0_.psi1;
        DapskState st = dapsk0_;
        std::vector<int> tx_b1(N, 0);
        std::vector<unsigned> tx_label(N, 0);
        CMatrix X(1, static_cast<Eigen::Index>(N));
        X(0, 0) = st.prev_amp * st.prev_code;
        std::vector<int> bits(1 + psk_.bits);
        for (std::size_t v = 1; v < N; ++v)
        {
            tx_b1[v] = rng.bit();
            tx_label[v] = draw_label(rng, psk_.bits);
            bits[0] = tx_b1[v];
            label_to_bits(tx_label[v], psk_.bits, std::span<int>(bits).subspan(1));
            X(0, static_cast<Eigen::Index>(v)) = dapsk_encode(bits, psk_, st);
        }
        const CMatrix Q = receive_quantized(X, op, rng);
        const auto U = static_cast<std::size_t>(Q.rows());

        TrialCounts t;
        DapskObservation obs;
        obs.rho_set = op.rho_set;
        double prev_hat = psi0;
        for (std::size_t v = 1; v < N; ++v)
        {
            obs.q_prev = Q.col(static_cast<Eigen::Index>(v - 1));
            obs.q_curr = Q.col(static_cast<Eigen::Index>(v));
            int b1 = 0;
            std::size_t sym = 0;
            bool erased = false;
            auto phase_decision = [&]() -> DapskDecision {
                if (cfg_.phase_detector == PhaseDetector::InverseDecoding)
                    return inverse_decode(obs, psk_, a);
                return cfg_.adc_bits == 1 ? ml_one_bit_dapsk(obs, psk_, a) : multibit_ml(obs, quant_, psk_, a);
            };
            try
            {
                switch (cfg_.detector)
                {
                case Detector::Ml:
                case Detector::Id:
                case Detector::Multibit:
                {
                    const DapskDecision d = cfg_.detector == Detector::Ml   ? ml_one_bit_dapsk(obs, psk_, a)
                                            : cfg_.detector == Detector::Id ? inverse_decode(obs, psk_, a)
                                                                            : multibit_ml(obs, quant_, psk_, a);
                    erased = d.erasure;
                    b1 = d.amp_index != 0;
                    sym = d.symbol;
                    break;
                }
                case Detector::Energy:
                {
                    const AmplitudeDecision ad =
                        detect_amplitude(energy_statistic(obs.q_curr), op.gamma, prev_hat, psi0, psi1);
                    prev_hat = ad.amplitude;
                    b1 = ad.b1;
                    const DapskDecision d = phase_decision();
                    erased = d.erasure;
                    sym = d.symbol;
                    break;
                }
                case Detector::Vql:
                {
                    const VqlDecision d =
                        vql_detect(*vql_, obs, op.gamma, prev_hat, psi0, psi1, psk_, cfg_.phase_detector);
                    prev_hat = d.amplitude.amplitude;
                    b1 = d.amplitude.b1;
                    sym = d.symbol;
                    break;
                }
                default: throw ConfigError("detector not available for DAPSK");
                }
            }
            catch (const DetectionError &)
            {
                erased = true;
            }
            const std::uint64_t amp_err = b1 != tx_b1[v];
            const std::uint64_t phase_err = bit_diff(psk_.labels[sym], tx_label[v]);
            t.amp_bit_errors += amp_err;
            t.bit_errors += amp_err + phase_err;
            t.symbol_errors += (erased || amp_err || phase_err) ? 1 : 0;
            t.erasures += erased;
        }
        (void)U;
        t.symbols = N - 1;
        t.amp_bits = N - 1;
        t.bits = t.symbols * (1 + psk_.bits);
        return t;
    }

    TrialCounts Simulator::run_trial(const OperatingPoint &op, std::uint64_t trial) const
    {
        RandomSource rng(cfg_.seed, trial);
        switch (cfg_.scheme)
        {
        case Scheme::Dpsk: return trial_dpsk(op, rng);
        case Scheme::Dapsk: return trial_dapsk(op, rng);
        case Scheme::Coherent: return trial_coherent(op, rng);
        }
        return {};
    }

    MetricRecord Simulator::run_point(double snr_db) const
    {
        const auto t0 = std::chrono::steady_clock::now();
        const OperatingPoint op = prepare(snr_db);
        std::size_t threads = cfg_.threads ? cfg_.threads : std::max(1u, std::thread::hardware_concurrency());

        MetricRecord rec;
        rec.snr_db = snr_db;
        rec.seed = cfg_.seed;
        std::vector<TrialCounts> batch;
        for (std::uint64_t first = 0; first < cfg_.trials; first += cfg_.batch_size)
        {
            const std::size_t n = std::min<std::uint64_t>(cfg_.batch_size, cfg_.trials - first);
            batch.assign(n, TrialCounts{});
            const std::size_t workers = std::min(threads, n);
            if (workers <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    batch[i] = run_trial(op, first + i);
            }
            else
            {
                std::exception_ptr failure;
                std::mutex failure_mutex;
                std::vector<std::thread> pool;
                for (std::size_t w = 0; w < workers; ++w)
                    pool.emplace_back([&, w] {
                        try
                        {
                            for (std::size_t i = w; i < n; i += workers)
                                batch[i] = run_trial(op, first + i);
                        }
                        catch (...)
                        {
                            std::lock_guard<std::mutex> lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    });
                for (auto &th : pool)
                    th.join();
                if (failure)
                    std::rethrow_exception(failure);
            }
            for (const auto &c : batch)
                rec.counts += c;
            rec.trials += n;
            if (cfg_.stop_errors > 0 && rec.counts.bit_errors >= cfg_.stop_errors)
                break;
        }
        const TrialCounts &c = rec.counts;
        rec.ber = c.bits ? static_cast<double>(c.bit_errors) / static_cast<double>(c.bits) : 0.0;
        rec.ser = c.symbols ? static_cast<double>(c.symbol_errors) / static_cast<double>(c.symbols) : 0.0;
        rec.amp_ber = c.amp_bits ? static_cast<double>(c.amp_bit_errors) / static_cast<double>(c.amp_bits) : 0.0;
        rec.spectral_efficiency = spectral_efficiency(rec.ser, cfg_);
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rec;
    }

    std::vector<MetricRecord> Simulator::sweep() const
    {
        std::vector<double> grid = cfg_.snr_db;
        std::sort(grid.begin(), grid.end());
        std::vector<MetricRecord> out;
        for (double s : grid)
            out.push_back(run_point(s));
        return out;
    }

    void Simulator::energy_samples(const OperatingPoint &op, std::size_t trials, std::uint64_t seed,
                                   std::vector<double> &low, std::vector<double> &high) const
    {
        const std::size_t U = cfg_.num_rx;
        low.assign(trials, 0.0);
        high.assign(trials, 0.0);
        CVector h(static_cast<Eigen::Index>(U)), z(static_cast<Eigen::Index>(U));
        for (std::size_t t = 0; t < trials; ++t)
        {
            // same channel, phase and noise under both rings
            RandomSource rng(seed, threshold_stream | t);
            const ChannelRealization real = draw_realization(chan_, rng);
            h = freq_response(chan_, real, 0).col(0);
            const cplx phase = std::polar(1.0, 2.0 * pi * rng.uniform());
            for (Eigen::Index u = 0; u < z.size(); ++u)
                z(u) = op.noise_var > 0.0 ? complex_gaussian(rng, op.noise_var) : cplx{};
            double e0 = 0.0, e1 = 0.0;
            for (std::size_t u = 0; u < U; ++u)
            {
                const auto ui = static_cast<Eigen::Index>(u);
                const QuantizerSpec &spec = vql_ ? vql_->spec_for(u) : quant_;
                const cplx base = h(ui) * phase;
                e0 += std::norm(quantize_complex(op.agc_gain * (base * dapsk0_.psi0 + z(ui)), spec));
                e1 += std::norm(quantize_complex(op.agc_gain * (base * dapsk0_.psi1 + z(ui)), spec));
            }
            low[t] = e0 / static_cast<double>(U);
            high[t] = e1 / static_cast<double>(U);
        }
    }

    double Simulator::threshold_mc(const OperatingPoint &op, std::size_t trials, std::uint64_t seed) const
    {
        if (cfg_.scheme != Scheme::Dapsk)
            throw ConfigError("energy thresholds apply to DAPSK only");
        std::vector<double> low, high;
        energy_samples(op, trials, seed, low, high);
        return empirical_threshold(low, high);
    }

    double Simulator::threshold_analytic(const OperatingPoint &op) const
    {
        if (cfg_.scheme != Scheme::Dapsk)
            throw ConfigError("energy thresholds apply to DAPSK only");
        return amplitude_threshold(op.energy);
    }

    std::string Simulator::describe() const
    {
        std::ostringstream o;
        o << "scheme: " << to_string(cfg_.scheme) << " (" << to_string(cfg_.mode) << "), detector "
          << to_string(cfg_.detector) << "\n";
        o << "antennas: U = " << cfg_.num_rx << ", K = " << cfg_.num_tx << "; N = " << cfg_.num_uses
          << ", M = " << cfg_.psk_order << ", bits/symbol = " << bits_per_symbol(cfg_) << "\n";
        o << "channel: L = " << chan_.num_taps << ", pdp =";
        for (double p : chan_.pdp)
            o << " " << fmt(p);
        o << "\n";
        if (quant_.passthrough())
            o << "quantizer: none\n";
        else
            o << "quantizer: " << quant_.bits << " bit(s), eta = " << fmt(quant_.eta)
              << ", sigma_eps^2 = " << fmt(quant_.noise_var) << "\n";
        if (vql_)
            for (std::size_t j = 0; j < 3; ++j)
                o << "vql group " << j << ": " << vql_->sizes[j] << " antennas, threshold "
                  << fmt(vql_->specs[j].boundaries[1]) << ", eta = " << fmt(vql_->specs[j].eta)
                  << ", sigma_eps^2 = " << fmt(vql_->specs[j].noise_var) << "\n";
        if (cfg_.scheme == Scheme::Dapsk)
            o << "rings: a = " << fmt(cfg_.ring_ratio) << ", psi0 = " << fmt(dapsk0_.psi0)
              << ", psi1 = " << fmt(dapsk0_.psi1) << "\n";
        if (plan_)
            o << "pilots: xi = " << fmt(plan_->fraction) << ", " << plan_->positions.size() << " pilot uses, block "
              << plan_->block_len << "\n";
        o << "data fraction: " << fmt(data_fraction(cfg_)) << "\n";
        for (double s : cfg_.snr_db)
        {
            const OperatingPoint op = prepare(s);
            o << "snr " << fmt(s) << " dB: sigma_z^2 = " << fmt(op.noise_var) << ", rho = " << fmt(op.rho)
              << ", rho_set = {" << fmt(op.rho_set[0]) << ", " << fmt(op.rho_set[1]) << ", " << fmt(op.rho_set[2])
              << "}";
            if (op.gamma > 0.0)
                o << ", gamma = " << fmt(op.gamma);
            o << "\n";
        }
        return o.str();
    }

    std::vector<MetricRecord> sweep(const SimConfig &cfg) { return Simulator(cfg).sweep(); }

    std::string format_csv(const std::vector<MetricRecord> &records)
    {
        std::string out = "snr_db,ber,ser,spectral_efficiency,bits,trials,seed\n";
        for (const auto &r : records)
            out += fmt(r.snr_db) + "," + fmt(r.ber) + "," + fmt(r.ser) + "," + fmt(r.spectral_efficiency) + "," +
                   std::to_string(r.counts.bits) + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) +
                   "\n";
        return out;
    }

    void write_csv(const std::vector<MetricRecord> &records, const std::string &path)
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot open '" + path + "' for writing");
        f << format_csv(records);
        f.flush();
        if (!f)
            throw IoError("failed writing '" + path + "'");
    }

    std::vector<ThresholdRow> threshold_table(const SimConfig &cfg, const std::vector<std::size_t> &num_rx,
                                              const std::vector<double> &snr_db)
    {
        if (cfg.scheme != Scheme::Dapsk)
            throw ConfigError("calibrate-threshold needs scheme = dapsk");
        std::vector<ThresholdRow> rows;
        for (std::size_t U : num_rx)
        {
            SimConfig c = cfg;
            c.num_rx = U;
            if (c.detector == Detector::Vql)
            {
                const std::size_t third = U / 3;
                c.vql_sizes = std::array<std::size_t, 3>{third, U - 2 * third, third};
            }
            else
            {
                c.detector = Detector::Energy;
                c.vql_sizes.reset();
            }
            const Simulator sim(c);
            for (double s : snr_db)
            {
                const OperatingPoint op = sim.prepare(s, false);
                rows.push_back({U, s, sim.threshold_mc(op, c.threshold_trials, c.seed), sim.threshold_analytic(op)});
            }
        }
        return rows;
    }

    std::string format_threshold_csv(const std::vector<ThresholdRow> &rows)
    {
        std::string out = "num_rx,snr_db,gamma_mc,gamma_analytic\n";
        for (const auto &r : rows)
            out += std::to_string(r.num_rx) + "," + fmt(r.snr_db) + "," + fmt(r.gamma_mc) + "," +
                   fmt(r.gamma_analytic) + "\n";
        return out;
    }
}
