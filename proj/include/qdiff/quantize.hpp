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

#ifndef QDIFF_QUANTIZE_HPP
#define QDIFF_QUANTIZE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "qdiff/statmath.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    /// Scalar quantizer applied independently to the real and imaginary parts.
    ///
    /// boundaries has E + 1 entries from -inf to +inf; labels has E entries.
    /// bits == 0 denotes the unquantized pass-through (eta = 1, noise_var = 0).
    struct QuantizerSpec
    {
        unsigned bits = 1;
        std::vector<double> boundaries;
        std::vector<double> labels;
        double eta = 0.0;       // Bussgang gain
        double noise_var = 0.0; // Bussgang distortion power sigma_eps^2 (complex)
        bool calibrated = false;

        bool passthrough() const { return bits == 0; }
        std::size_t levels() const { return labels.size(); }

        /// Bin index l with boundaries[l] <= x < boundaries[l + 1].
        std::size_t bin(double x) const;
        /// Bin index of a label value (exact match first, nearest label otherwise).
        std::size_t bin_of_label(double label) const;

        void validate() const;
    };

    QuantizerSpec one_bit_spec();
    QuantizerSpec passthrough_spec();

    /// Gaussian-centroid labels for the given boundaries: E[x | bin] for x ~ N(0, per_dim_std^2).
    std::vector<double> centroid_labels(const std::vector<double> &boundaries, double per_dim_std);

    /// Thresholds {-inf, -z, 0, z, +inf}, z = cos(pi/4) sqrt(2 a^2 / (a^2 + 1)), with centroid labels for a
    /// unit-power complex input. Throws DomainError unless a > 1.
    QuantizerSpec dapsk_two_bit_spec(double ring_ratio);

    /// Two-level quantizer with a single threshold and the given output levels.
    QuantizerSpec threshold_spec(double threshold, double low, double high);

    double quantize_real(double x, const QuantizerSpec &spec);
    cplx quantize_complex(cplx s, const QuantizerSpec &spec);

    /// sgn(Re s) + j sgn(Im s) with sgn(0) = +1.
    inline cplx one_bit(cplx s)
    {
        return {s.real() >= 0.0 ? 1.0 : -1.0, s.imag() >= 0.0 ? 1.0 : -1.0};
    }

    struct BussgangPair
    {
        double eta = 0.0;
        double noise_var = 0.0;
    };

    /// Monte-Carlo Bussgang pair for CN(0, input_var) input:
    /// eta = E[x^* q] / E|x|^2, noise_var = E|q - eta x|^2.
    /// Throws CalibrationError for a single-label spec, DomainError for bad arguments.
    BussgangPair bussgang_calibrate(const QuantizerSpec &spec, double input_var, RandomSource &rng,
                                    std::size_t n_samples);

    /// Copy of spec with the calibrated pair attached.
    QuantizerSpec calibrated(const QuantizerSpec &spec, double input_var, RandomSource &rng, std::size_t n_samples);

    /// Antenna groups for variable-quantization-level reception. Groups are contiguous index ranges
    /// in the order of `sizes`; group j uses threshold {z2, 0, z4}[j] and group 1 is the sign group.
    struct VqlPartition
    {
        std::size_t num_rx = 0;
        std::array<std::size_t, 3> sizes{};
        std::array<std::size_t, 3> first{};
        std::array<QuantizerSpec, 3> specs;
        std::size_t sgn_group = 1;

        std::size_t group_of(std::size_t u) const;
        const QuantizerSpec &spec_for(std::size_t u) const { return specs[group_of(u)]; }
    };

    /// Offset groups get Gaussian-centroid output levels, the sign group gets +-1.
    /// Throws ConfigError unless the sizes sum to U; warns when no offset group is populated.
    VqlPartition vql_partition(std::size_t num_rx, double ring_ratio, const std::array<std::size_t, 3> &sizes);
}

#endif
