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

#include "qdiff/statmath.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qdiff/error.hpp"

namespace qdiff
{
    namespace
    {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        constexpr double half_log_2pi = 0.91893853320467274178;

        void require_finite(double t, const char *what)
        {
            if (!std::isfinite(t))
                throw DomainError(std::string(what) + ": argument must be finite");
        }

        // log Phi(t) for t << 0 from Phi(t) = phi(t)/(-t) * (1 - 1/t^2 + 3/t^4 - 15/t^6 + ...).
        double log_cdf_lower_tail(double t)
        {
            const double r = 1.0 / (t * t);
            double term = 1.0;
            double sum = 1.0;
            for (int k = 1; k <= 12; ++k)
            {
                term *= -static_cast<double>(2 * k - 1) * r;
                sum += term;
            }
            return -0.5 * t * t - std::log(-t) - half_log_2pi + std::log(sum);
        }
    }

    double std_normal_cdf(double t)
    {
        require_finite(t, "std_normal_cdf");
        return 0.5 * std::erfc(-t * inv_sqrt2);
    }

    double std_normal_pdf(double t)
    {
        return std::exp(-0.5 * t * t - half_log_2pi);
    }

    double log_std_normal_cdf(double t)
    {
        require_finite(t, "log_std_normal_cdf");
        if (t < -30.0)
            return log_cdf_lower_tail(t);
        if (t > 0.0)
            return std::log1p(-0.5 * std::erfc(t * inv_sqrt2));
        return std::log(0.5 * std::erfc(-t * inv_sqrt2));
    }

    namespace
    {
        class LogPhiTable
        {
        public:
            static constexpr double lo = -40.0, hi = 10.0, step = 1.0 / 64.0;

            LogPhiTable()
            {
                const auto n = static_cast<std::size_t>((hi - lo) / step);
                coef_.resize(6 * n);
                auto node = [](double t, double &f, double &d1, double &d2) {
                    f = log_std_normal_cdf(t);
                    const double lambda = std::exp(-0.5 * t * t - half_log_2pi - f); // phi / Phi
                    d1 = lambda;
                    d2 = -lambda * (t + lambda);
                };
                double f0, m0, c0;
                node(lo, f0, m0, c0);
                for (std::size_t i = 0; i < n; ++i)
                {
                    double f1, m1, c1;
                    node(lo + static_cast<double>(i + 1) * step, f1, m1, c1);
                    // derivatives in the unit variable u = (t - t_i) / step
                    const double a0 = f0, a1 = m0 * step, a2 = 0.5 * c0 * step * step;
                    const double d = f1 - a0 - a1 - a2, e = m1 * step - a1 - 2.0 * a2, g = c1 * step * step - 2.0 * a2;
                    double *c = &coef_[6 * i];
                    c[0] = a0;
                    c[1] = a1;
                    c[2] = a2;
                    c[3] = 10.0 * d - 4.0 * e + 0.5 * g;
                    c[4] = -15.0 * d + 7.0 * e - g;
                    c[5] = 6.0 * d - 3.0 * e + 0.5 * g;
                    f0 = f1;
                    m0 = m1;
                    c0 = c1;
                }
            }

            double operator()(double t) const
            {
                const double x = (t - lo) * (1.0 / step);
                const auto i = static_cast<std::size_t>(x);
                const double u = x - static_cast<double>(i);
                const double *c = &coef_[6 * i];
                return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
            }

        private:
            std::vector<double> coef_;
        };
    }

    double log_std_normal_cdf_fast(double t)
    {
        static const LogPhiTable table;
        if (t > LogPhiTable::lo && t < LogPhiTable::hi)
            return table(t);
        if (std::isnan(t))
            return t;
        return log_std_normal_cdf(t);
    }

    double log_std_normal_interval(double lo, double hi)
    {
        if (!(lo < hi))
            return -std::numeric_limits<double>::infinity();
        // Reflect so the interval sits in the lower half where the CDF has full relative precision.
        if (lo > 0.0)
        {
            const double a = -hi;
            const double b = -lo;
            lo = a;
            hi = b;
        }
        if (std::isinf(lo))
            return std::isinf(hi) ? 0.0 : log_std_normal_cdf(hi);
        if (std::isinf(hi))
            return log_std_normal_cdf(-lo);
        const double log_hi = log_std_normal_cdf(hi);
        const double log_lo = log_std_normal_cdf(lo);
        const double d = log_lo - log_hi;
        if (d >= 0.0)
            return -std::numeric_limits<double>::infinity();
        return log_hi + std::log(-std::expm1(d));
    }

    Philox4x32::Block Philox4x32::generate(Block ctr, Key key)
    {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += w0;
                key[1] += w1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

    void RandomSource::refill()
    {
        const Philox4x32::Block ctr = {static_cast<std::uint32_t>(block_counter_),
                                       static_cast<std::uint32_t>(block_counter_ >> 32),
                                       static_cast<std::uint32_t>(stream_),
                                       static_cast<std::uint32_t>(stream_ >> 32)};
        const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
        const auto out = Philox4x32::generate(ctr, key);
        ++block_counter_;
        buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        buffered_ = 2;
    }

    RandomSource::result_type RandomSource::operator()()
    {
        if (buffered_ == 0)
            refill();
        return buffer_[2 - buffered_--];
    }

    double RandomSource::uniform()
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    double RandomSource::gaussian()
    {
        return normal_(*this);
    }

    std::uint64_t RandomSource::below(std::uint64_t n)
    {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(*this);
    }

    cplx complex_gaussian(RandomSource &rng, double variance)
    {
        if (!(variance > 0.0))
            throw DomainError("complex_gaussian: variance must be positive");
        const double s = std::sqrt(0.5 * variance);
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        return {s * re, s * im};
    }
}
