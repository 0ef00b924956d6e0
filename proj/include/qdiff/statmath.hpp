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

#ifndef QDIFF_STATMATH_HPP
#define QDIFF_STATMATH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "qdiff/types.hpp"

namespace qdiff
{
    /// Standard normal CDF, evaluated through erfc so the lower tail keeps full relative precision.
    double std_normal_cdf(double t);

    /// log Phi(t). Finite for every finite t; uses the asymptotic tail expansion below t = -30.
    double log_std_normal_cdf(double t);

    /// log Phi(t) from a quintic Hermite table on [-40, 10] (step 1/64), exact function outside.
    /// Absolute error below 5e-13; meant for the likelihood sums of the ML detectors. NaN propagates.
    double log_std_normal_cdf_fast(double t);

    /// log(Phi(hi) - Phi(lo)) for lo < hi, either bound may be infinite.
    /// Returns -inf only when the difference underflows.
    double log_std_normal_interval(double lo, double hi);

    /// Standard normal density.
    double std_normal_pdf(double t);

    /// x > best by more than rounding noise. Argmax loops use it so that candidates tied in exact
    /// arithmetic resolve to the earliest one.
    inline bool clearly_greater(double x, double best)
    {
        if (std::isinf(best))
            return x > best;
        return x > best + 1e-12 * (1.0 + std::abs(best));
    }
    inline bool clearly_less(double x, double best) { return clearly_greater(-x, -best); }

    // Philox4x32-10 counter-based generator (Salmon et al., SC'11).
    class Philox4x32
    {
    public:
        using Block = std::array<std::uint32_t, 4>;
        using Key = std::array<std::uint32_t, 2>;
        static Block generate(Block counter, Key key);
    };

    /// Deterministic random stream identified by (seed, stream_id).
    ///
    /// The stream id occupies the upper half of the Philox counter, so stream k can be
    /// generated directly without touching streams 0..k-1. One Monte-Carlo trial owns one
    /// stream. Satisfies UniformRandomBitGenerator.
    class RandomSource
    {
    public:
        using result_type = std::uint64_t;

        RandomSource(std::uint64_t seed, std::uint64_t stream_id);

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
        result_type operator()();

        double uniform();  // [0, 1)
        double gaussian(); // N(0, 1)
        std::uint64_t below(std::uint64_t n); // uniform integer in [0, n)
        int bit() { return static_cast<int>((*this)() >> 63); }

        std::uint64_t seed() const { return seed_; }
        std::uint64_t stream_id() const { return stream_; }

    private:
        void refill();

        std::uint64_t seed_;
        std::uint64_t stream_;
        std::uint64_t block_counter_ = 0;
        std::array<std::uint64_t, 2> buffer_{};
        int buffered_ = 0;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };

    /// Circularly symmetric complex Gaussian with E|x|^2 = variance. Throws DomainError for variance <= 0.
    cplx complex_gaussian(RandomSource &rng, double variance);
}

#endif
