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

#include "qdiff/detect_dapsk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qdiff/error.hpp"
#include "qdiff/log.hpp"
#include "qdiff/statmath.hpp"

namespace qdiff
{
    namespace
    {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();

        double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

        void check_obs(const DapskObservation &obs)
        {
            if (obs.q_prev.size() == 0 || obs.q_prev.size() != obs.q_curr.size())
                throw ShapeError("DAPSK detector: q_prev and q_curr must have the same nonzero length");
            for (double r : obs.rho_set)
                if (!(r > 0.0))
                    throw DomainError("DAPSK detector: rho values must be positive");
        }

        // Re / Im of q_prev * s: the two real rows of F_R applied to s_R.
        void prev_dots(const CVector &q_prev, cplx s, std::vector<double> &dots)
        {
            dots.resize(static_cast<std::size_t>(2 * q_prev.size()));
            for (Eigen::Index u = 0; u < q_prev.size(); ++u)
            {
                const cplx z = q_prev(u) * s;
                dots[static_cast<std::size_t>(2 * u)] = z.real();
                dots[static_cast<std::size_t>(2 * u + 1)] = z.imag();
            }
        }
    }

    std::array<double, 3> dapsk_rho_set(double eta, double noise_var_z, double noise_var_eps, double a)
    {
        const double base = eta * eta * noise_var_z + noise_var_eps;
        if (!(base > 0.0))
            throw DomainError("dapsk_rho_set: composite noise must be positive");
        const auto ratios = dapsk_ratios(a);
        std::array<double, 3> rho{};
        for (std::size_t k = 0; k < 3; ++k)
            rho[k] = 1.0 / ((1.0 + ratios[k] * ratios[k]) * base);
        return rho;
    }

    DapskDecision ml_one_bit_dapsk(const DapskObservation &obs, const PskConstellation &psk, double a)
    {
        check_obs(obs);
        const Eigen::Index U = obs.q_curr.size();
        std::vector<double> signs(static_cast<std::size_t>(2 * U));
        for (Eigen::Index u = 0; u < U; ++u)
        {
            const cplx z = obs.q_curr(u);
            if (std::abs(z.real()) != 1.0 || std::abs(z.imag()) != 1.0)
                throw DomainError("ml_one_bit_dapsk: current labels must be one-bit");
            signs[static_cast<std::size_t>(2 * u)] = sign_of(z.real());
            signs[static_cast<std::size_t>(2 * u + 1)] = sign_of(z.imag());
        }
        const auto ratios = dapsk_ratios(a);
        std::array<double, 3> sqrt_rho{};
        for (std::size_t k = 0; k < 3; ++k)
            sqrt_rho[k] = std::sqrt(obs.rho_set[k]);

        DapskDecision best;
        double best_score = neg_inf;
        std::vector<double> dots;
        for (std::size_t ai = 0; ai < 3; ++ai)
            for (std::size_t m = 0; m < psk.order; ++m)
            {
                prev_dots(obs.q_prev, psk.points[m], dots);
                double score = neg_inf;
                for (std::size_t k = 0; k < 3; ++k)
                {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < dots.size(); ++r)
                        acc += log_std_normal_cdf_fast(sqrt_rho[k] * (ratios[ai] * (signs[r] * dots[r])));
                    score = std::max(score, acc);
                }
                if (clearly_greater(score, best_score))
                {
                    best_score = score;
                    best = {ai, ratios[ai], m, false};
                }
            }
        return best;
    }

    std::size_t ml_one_bit_phase(const DapskObservation &obs, const PskConstellation &psk, std::size_t first,
                                 std::size_t count)
    {
        check_obs(obs);
        if (count == 0 || first + count > static_cast<std::size_t>(obs.q_curr.size()))
            throw ConfigError("ml_one_bit_phase: empty or out-of-range antenna group");
        const double sr = std::sqrt(obs.rho_set[0]);
        std::size_t best = 0;
        double best_score = neg_inf;
        for (std::size_t m = 0; m < psk.order; ++m)
        {
            double acc = 0.0;
            for (std::size_t u = first; u < first + count; ++u)
            {
                const auto ui = static_cast<Eigen::Index>(u);
                const cplx qc = obs.q_curr(ui);
                if (std::abs(qc.real()) != 1.0 || std::abs(qc.imag()) != 1.0)
                    throw DomainError("ml_one_bit_phase: labels of the phase group must be one-bit");
                const cplx z = obs.q_prev(ui) * psk.points[m];
                acc += log_std_normal_cdf_fast(sr * (sign_of(qc.real()) * z.real()));
                acc += log_std_normal_cdf_fast(sr * (sign_of(qc.imag()) * z.imag()));
            }
            if (clearly_greater(acc, best_score))
            {
                best_score = acc;
                best = m;
            }
        }
        return best;
    }

    cplx inverse_decode_estimate(const DapskObservation &obs, std::size_t first, std::size_t count)
    {
        if (obs.q_prev.size() != obs.q_curr.size())
            throw ShapeError("inverse_decode: q_prev and q_curr lengths differ");
        if (count == 0 || first + count > static_cast<std::size_t>(obs.q_curr.size()))
            throw ConfigError("inverse_decode: empty or out-of-range antenna group");
        // F_R^T F_R = sum |q_prev|^2 I_2, so the pseudo-inverse reduces to a matched filter.
        cplx num = 0.0;
        double den = 0.0;
        for (std::size_t u = first; u < first + count; ++u)
        {
            const auto ui = static_cast<Eigen::Index>(u);
            num += std::conj(obs.q_prev(ui)) * obs.q_curr(ui);
            den += std::norm(obs.q_prev(ui));
        }
        if (!(den > 1e-300))
            throw DetectionError("inverse_decode: F_R is rank deficient");
        return num / den;
    }

    DapskDecision inverse_decode(const DapskObservation &obs, const PskConstellation &psk, double a)
    {
        const cplx x = inverse_decode_estimate(obs, 0, static_cast<std::size_t>(obs.q_curr.size()));
        const auto ratios = dapsk_ratios(a);
        DapskDecision best;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t ai = 0; ai < 3; ++ai)
            for (std::size_t m = 0; m < psk.order; ++m)
            {
                const double d = std::norm(x - ratios[ai] * psk.points[m]);
                if (clearly_less(d, best_d))
                {
                    best_d = d;
                    best = {ai, ratios[ai], m, false};
                }
            }
        return best;
    }

    DapskDecision multibit_ml(const DapskObservation &obs, const QuantizerSpec &spec, const PskConstellation &psk,
                              double a)
    {
        check_obs(obs);
        if (spec.passthrough())
            throw ConfigError("multibit_ml: needs a quantizer with finite labels");
        const Eigen::Index U = obs.q_curr.size();
        std::vector<std::size_t> bins(static_cast<std::size_t>(2 * U));
        for (Eigen::Index u = 0; u < U; ++u)
        {
            bins[static_cast<std::size_t>(2 * u)] = spec.bin_of_label(obs.q_curr(u).real());
            bins[static_cast<std::size_t>(2 * u + 1)] = spec.bin_of_label(obs.q_curr(u).imag());
        }
        const auto ratios = dapsk_ratios(a);
        std::array<double, 3> sqrt_rho{};
        for (std::size_t k = 0; k < 3; ++k)
            sqrt_rho[k] = std::sqrt(obs.rho_set[k]);

        DapskDecision best{0, ratios[0], 0, true};
        double best_score = neg_inf;
        std::vector<double> dots;
        for (std::size_t ai = 0; ai < 3; ++ai)
            for (std::size_t m = 0; m < psk.order; ++m)
            {
                prev_dots(obs.q_prev, psk.points[m], dots);
                double score = neg_inf;
                for (std::size_t k = 0; k < 3; ++k)
                {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < dots.size(); ++r)
                    {
                        const std::size_t b = bins[r];
                        const double mean = ratios[ai] * dots[r];
                        acc += log_std_normal_interval(sqrt_rho[k] * (spec.boundaries[b] - mean),
                                                       sqrt_rho[k] * (spec.boundaries[b + 1] - mean));
                    }
                    score = std::max(score, acc);
                }
                if (clearly_greater(score, best_score))
                {
                    best_score = score;
                    best = {ai, ratios[ai], m, false};
                }
            }
        return best;
    }

    double energy_statistic(const CVector &q)
    {
        if (q.size() == 0)
            throw ShapeError("energy_statistic: empty observation");
        return q.squaredNorm() / static_cast<double>(q.size());
    }

    EnergyMoments energy_moments(const EnergyModel &model, double amplitude)
    {
        if (model.num_rx == 0)
            throw DomainError("energy_moments: U must be positive");
        const double s2 = model.composite_noise;
        const double sig = amplitude * amplitude * model.eta * model.eta * model.alpha2;
        return {s2 + sig, 2.0 * s2 / static_cast<double>(model.num_rx) * (2.0 * s2 + 2.0 * sig)};
    }

    namespace
    {
        double log_density_gap(double x, const EnergyMoments &lo, const EnergyMoments &hi)
        {
            // log N(x; hi) - log N(x; lo), up to the common constant
            return -0.5 * ((x - hi.mean) * (x - hi.mean) / hi.var + std::log(hi.var)) +
                   0.5 * ((x - lo.mean) * (x - lo.mean) / lo.var + std::log(lo.var));
        }

        double bisect_gap(const EnergyMoments &lo, const EnergyMoments &hi)
        {
            double a = lo.mean, b = hi.mean;
            // the gap is negative at mu_0 and positive at mu_1 for any proper pair crossing between them
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it)
            {
                const double m = 0.5 * (a + b);
                if (log_density_gap(m, lo, hi) < 0.0)
                    a = m;
                else
                    b = m;
            }
            return 0.5 * (a + b);
        }
    }

    double gaussian_intersection(const EnergyMoments &low, const EnergyMoments &high)
    {
        if (!(low.var > 0.0) || !(high.var > 0.0))
            throw DomainError("amplitude_threshold: variances must be positive");
        if (!(low.mean < high.mean))
            throw DomainError("amplitude_threshold: ring means must be distinct and ordered");
        const double m0 = low.mean, m1 = high.mean, v0 = low.var, v1 = high.var;
        const double qa = 1.0 / v1 - 1.0 / v0;
        const double qb = -2.0 * (m1 / v1 - m0 / v0);
        const double qc = m1 * m1 / v1 - m0 * m0 / v0 + std::log(v1 / v0);
        if (qa == 0.0)
        {
            const double g = -qc / qb;
            if (g > m0 && g < m1)
                return g;
            return bisect_gap(low, high);
        }
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0)
        {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
            const double roots[2] = {q / qa, q != 0.0 ? qc / q : q / qa};
            for (double g : roots)
                if (g > m0 && g < m1)
                    return g;
        }
        return bisect_gap(low, high);
    }

    double amplitude_threshold(const EnergyModel &model)
    {
        if (model.psi0 == model.psi1)
            throw DomainError("amplitude_threshold: ring amplitudes must differ");
        const double lo_amp = std::min(model.psi0, model.psi1), hi_amp = std::max(model.psi0, model.psi1);
        return gaussian_intersection(energy_moments(model, lo_amp), energy_moments(model, hi_amp));
    }

    double empirical_threshold(std::span<const double> low, std::span<const double> high)
    {
        if (low.empty() || high.empty())
            throw CalibrationError("empirical_threshold: both classes need samples");
        struct Sample
        {
            double value;
            int cls;
        };
        std::vector<Sample> all;
        all.reserve(low.size() + high.size());
        for (double v : low)
            all.push_back({v, 0});
        for (double v : high)
            all.push_back({v, 1});
        std::sort(all.begin(), all.end(), [](const Sample &x, const Sample &y) { return x.value < y.value; });

        // cut between unique values k and k+1: samples <= value_k go to psi0
        std::size_t low_above = low.size(), high_below = 0;
        std::size_t best_err = std::min(low.size(), high.size());
        double range_lo = 0.0, range_hi = 0.0;
        bool found = false;
        for (std::size_t i = 0; i < all.size();)
        {
            std::size_t j = i;
            while (j < all.size() && all[j].value == all[i].value)
            {
                if (all[j].cls == 0)
                    --low_above;
                else
                    ++high_below;
                ++j;
            }
            if (j == all.size())
                break;
            const std::size_t err = low_above + high_below;
            if (err < best_err || (found && err == best_err))
            {
                if (!found || err < best_err)
                {
                    range_lo = all[i].value;
                    found = true;
                }
                best_err = err;
                range_hi = all[j].value;
            }
            i = j;
        }
        if (!found)
        {
            const double m0 = std::accumulate(low.begin(), low.end(), 0.0) / static_cast<double>(low.size());
            const double m1 = std::accumulate(high.begin(), high.end(), 0.0) / static_cast<double>(high.size());
            warn("threshold calibration: energy histograms do not separate; using the midpoint of the means");
            return 0.5 * (m0 + m1);
        }
        return 0.5 * (range_lo + range_hi);
    }

    AmplitudeDecision detect_amplitude(double lambda, double gamma, double prev_amp, double psi0, double psi1)
    {
        if (!(gamma > 0.0))
            throw DomainError("detect_amplitude: threshold must be positive");
        AmplitudeDecision d;
        d.amplitude = lambda < gamma ? psi0 : psi1;
        d.b1 = d.amplitude == prev_amp ? 0 : 1;
        return d;
    }

    VqlDecision vql_detect(const VqlPartition &partition, const DapskObservation &obs, double gamma, double prev_amp,
                           double psi0, double psi1, const PskConstellation &psk, PhaseDetector phase)
    {
        if (static_cast<std::size_t>(obs.q_curr.size()) != partition.num_rx)
            throw ShapeError("vql_detect: observation length differs from the partition size");
        const std::size_t g = partition.sgn_group;
        if (partition.sizes[g] == 0)
            throw ConfigError("vql_detect: the sign group is empty");
        VqlDecision d;
        d.amplitude = detect_amplitude(energy_statistic(obs.q_curr), gamma, prev_amp, psi0, psi1);
        const std::size_t first = partition.first[g], count = partition.sizes[g];
        if (phase == PhaseDetector::MaximumLikelihood)
            d.symbol = ml_one_bit_phase(obs, psk, first, count);
        else
            d.symbol = psk.nearest(inverse_decode_estimate(obs, first, count));
        return d;
    }

    std::vector<int> recover_bits(std::size_t amp_index, std::size_t symbol, const PskConstellation &psk)
    {
        if (amp_index > 2 || symbol >= psk.order)
            throw IndexError("recover_bits: decision out of range");
        std::vector<int> bits(1 + psk.bits);
        bits[0] = amp_index == 0 ? 0 : 1;
        label_to_bits(psk.labels[symbol], psk.bits, std::span<int>(bits).subspan(1));
        return bits;
    }
}
