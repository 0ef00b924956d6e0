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

#include "qdiff/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qdiff/error.hpp"
#include "qdiff/log.hpp"

namespace qdiff
{
    namespace
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
    }

    std::size_t QuantizerSpec::bin(double x) const
    {
        // upper_bound gives the first boundary > x, so x == boundary lands in the upper bin
        const auto it = std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1, x);
        return static_cast<std::size_t>(it - (boundaries.begin() + 1));
    }

    std::size_t QuantizerSpec::bin_of_label(double label) const
    {
        std::size_t best = 0;
        double best_d = inf;
        for (std::size_t i = 0; i < labels.size(); ++i)
        {
            const double d = std::abs(labels[i] - label);
            if (d < best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    void QuantizerSpec::validate() const
    {
        if (passthrough())
            return;
        if (labels.size() < 2 || boundaries.size() != labels.size() + 1)
            throw ConfigError("quantizer: need E >= 2 labels and E + 1 boundaries");
        if (labels.size() != (std::size_t{1} << bits))
            throw ConfigError("quantizer: label count must be 2^bits");
        if (boundaries.front() != -inf || boundaries.back() != inf)
            throw ConfigError("quantizer: outer boundaries must be -inf and +inf");
        for (std::size_t i = 1; i < boundaries.size(); ++i)
            if (!(boundaries[i - 1] < boundaries[i]))
                throw ConfigError("quantizer: boundaries must be strictly increasing");
        for (std::size_t i = 1; i < labels.size(); ++i)
            if (!(labels[i - 1] < labels[i]))
                throw ConfigError("quantizer: labels must be strictly increasing");
    }

    QuantizerSpec one_bit_spec()
    {
        QuantizerSpec s;
        s.bits = 1;
        s.boundaries = {-inf, 0.0, inf};
        s.labels = {-1.0, 1.0};
        return s;
    }

    QuantizerSpec passthrough_spec()
    {
        QuantizerSpec s;
        s.bits = 0;
        s.eta = 1.0;
        s.noise_var = 0.0;
        s.calibrated = true;
        return s;
    }

    std::vector<double> centroid_labels(const std::vector<double> &boundaries, double per_dim_std)
    {
        if (!(per_dim_std > 0.0))
            throw DomainError("centroid_labels: standard deviation must be positive");
        std::vector<double> out;
        for (std::size_t i = 0; i + 1 < boundaries.size(); ++i)
        {
            const double lo = boundaries[i] / per_dim_std, hi = boundaries[i + 1] / per_dim_std;
            const double pdf_lo = std::isinf(lo) ? 0.0 : std_normal_pdf(lo);
            const double pdf_hi = std::isinf(hi) ? 0.0 : std_normal_pdf(hi);
            const double mass = std::exp(log_std_normal_interval(lo, hi));
            out.push_back(per_dim_std * (pdf_lo - pdf_hi) / mass);
        }
        return out;
    }

    QuantizerSpec dapsk_two_bit_spec(double a)
    {
        if (!(a > 1.0) || !std::isfinite(a))
            throw DomainError("dapsk_two_bit_spec: ring ratio must be a finite value > 1");
        const double z = std::cos(pi / 4.0) * std::sqrt(2.0 * a * a / (a * a + 1.0));
        QuantizerSpec s;
        s.bits = 2;
        s.boundaries = {-inf, -z, 0.0, z, inf};
        s.labels = centroid_labels(s.boundaries, std::sqrt(0.5));
        s.validate();
        return s;
    }

    QuantizerSpec threshold_spec(double threshold, double low, double high)
    {
        QuantizerSpec s;
        s.bits = 1;
        s.boundaries = {-inf, threshold, inf};
        s.labels = {low, high};
        s.validate();
        return s;
    }

    double quantize_real(double x, const QuantizerSpec &spec)
    {
        if (spec.passthrough())
            return x;
        return spec.labels[spec.bin(x)];
    }

    cplx quantize_complex(cplx s, const QuantizerSpec &spec)
    {
        return {quantize_real(s.real(), spec), quantize_real(s.imag(), spec)};
    }

    BussgangPair bussgang_calibrate(const QuantizerSpec &spec, double input_var, RandomSource &rng,
                                    std::size_t n_samples)
    {
        if (!(input_var > 0.0))
            throw DomainError("bussgang_calibrate: input variance must be positive");
        if (n_samples < 100000)
            throw DomainError("bussgang_calibrate: need at least 1e5 samples");
        if (spec.passthrough())
            return {1.0, 0.0};
        if (spec.labels.size() < 2)
            throw CalibrationError("bussgang_calibrate: quantizer has a single label");
        spec.validate();

        double cross = 0.0, power = 0.0;
        std::vector<cplx> x(n_samples), q(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i)
        {
            x[i] = complex_gaussian(rng, input_var);
            q[i] = quantize_complex(x[i], spec);
            cross += (std::conj(x[i]) * q[i]).real();
            power += std::norm(x[i]);
        }
        const double eta = cross / power;
        double err = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i)
            err += std::norm(q[i] - eta * x[i]);
        if (!(eta > 0.0))
            throw CalibrationError("bussgang_calibrate: non-positive gain");
        return {eta, err / static_cast<double>(n_samples)};
    }

    QuantizerSpec calibrated(const QuantizerSpec &spec, double input_var, RandomSource &rng, std::size_t n_samples)
    {
        QuantizerSpec out = spec;
        const BussgangPair p = bussgang_calibrate(spec, input_var, rng, n_samples);
        out.eta = p.eta;
        out.noise_var = p.noise_var;
        out.calibrated = true;
        return out;
    }

    std::size_t VqlPartition::group_of(std::size_t u) const
    {
        if (u >= num_rx)
            throw IndexError("VqlPartition: antenna index out of range");
        if (u < first[1])
            return 0;
        return u < first[2] ? 1 : 2;
    }

    VqlPartition vql_partition(std::size_t num_rx, double a, const std::array<std::size_t, 3> &sizes)
    {
        if (sizes[0] + sizes[1] + sizes[2] != num_rx)
            throw ConfigError("vql_partition: group sizes must sum to U = " + std::to_string(num_rx));
        const QuantizerSpec two_bit = dapsk_two_bit_spec(a);
        const double per_dim = std::sqrt(0.5);
        const double thresholds[3] = {two_bit.boundaries[1], 0.0, two_bit.boundaries[3]};

        VqlPartition p;
        p.num_rx = num_rx;
        p.sizes = sizes;
        p.first = {0, sizes[0], sizes[0] + sizes[1]};
        p.sgn_group = 1;
        for (std::size_t j = 0; j < 3; ++j)
        {
            if (j == p.sgn_group)
                p.specs[j] = one_bit_spec();
            else
            {
                const auto lv = centroid_labels({-inf, thresholds[j], inf}, per_dim);
                p.specs[j] = threshold_spec(thresholds[j], lv[0], lv[1]);
            }
        }
        if (sizes[0] == 0 && sizes[2] == 0)
            warn("VQL partition has only the sign group; the energy statistic is constant and amplitude is undetectable");
        return p;
    }
}
