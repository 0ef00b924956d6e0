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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "qdiff/error.hpp"
#include "qdiff/statmath.hpp"

using namespace qdiff;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("normal cdf against long double erfc and quadrature")
{
    for (double t = -8.0; t <= 8.0; t += 0.125)
    {
        const double ref = static_cast<double>(oracle::phi_ld(t));
        CHECK_THAT(std_normal_cdf(t), WithinRel(ref, 1e-14));
    }
    for (double t : {-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.5})
        CHECK_THAT(std_normal_cdf(t), WithinAbs(oracle::phi_quadrature(t), 1e-14));
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK_THAT(std_normal_cdf(1.0), WithinAbs(0.8413447460685429, 1e-15));
}

TEST_CASE("log cdf keeps relative precision deep in the tail")
{
    for (double t = -60.0; t <= 12.0; t += 0.37)
    {
        const double ref = static_cast<double>(oracle::log_phi_hp(t));
        CHECK_THAT(log_std_normal_cdf(t), WithinRel(ref, 1e-12) || WithinAbs(ref, 1e-300));
    }
    // either side of the asymptotic switch
    for (double t : {-30.0001, -29.9999, -35.0, -300.0, -1e4})
        CHECK_THAT(log_std_normal_cdf(t), WithinRel(static_cast<double>(oracle::log_phi_hp(t)), 1e-13));
    CHECK(std::isfinite(log_std_normal_cdf(-1e6)));
}

TEST_CASE("log cdf rejects non-finite arguments")
{
    CHECK_THROWS_AS(log_std_normal_cdf(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(log_std_normal_cdf(std::nan("")), DomainError);
    CHECK_THROWS_AS(std_normal_cdf(std::nan("")), DomainError);
}

TEST_CASE("log cdf is monotone and non-positive")
{
    double prev = -std::numeric_limits<double>::infinity();
    for (double t = -50.0; t <= 40.0; t += 0.01)
    {
        const double v = log_std_normal_cdf(t);
        REQUIRE(v <= 0.0);
        REQUIRE(v >= prev);
        prev = v;
    }
}

TEST_CASE("log interval")
{
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<std::pair<double, double>> cases = {
        {-1.0, 1.0}, {0.0, 0.1},   {-40.0, -39.0}, {39.0, 40.0}, {5.0, 5.000001}, {-inf, -45.0},
        {-inf, 3.0}, {2.0, inf},   {45.0, inf},    {-0.3, inf},  {-inf, inf},     {-12.0, 12.0},
        {8.0, 9.0},  {-9.0, -8.0}, {-1e-3, 1e-3}};
    for (auto [lo, hi] : cases)
    {
        INFO("lo " << lo << " hi " << hi);
        const double ref = static_cast<double>(oracle::log_interval_hp(lo, hi));
        CHECK_THAT(log_std_normal_interval(lo, hi), WithinRel(ref, 1e-9) || WithinAbs(ref, 1e-15));
    }
    CHECK(log_std_normal_interval(1.0, 1.0) == -inf);
    CHECK(log_std_normal_interval(2.0, 1.0) == -inf);
    CHECK(log_std_normal_interval(-inf, inf) == 0.0);
}

TEST_CASE("interval of a half line equals the cdf")
{
    const double inf = std::numeric_limits<double>::infinity();
    for (double t = -40.0; t <= 40.0; t += 1.3)
    {
        CHECK_THAT(log_std_normal_interval(-inf, t), WithinRel(log_std_normal_cdf(t), 1e-14));
        CHECK_THAT(log_std_normal_interval(t, inf), WithinRel(log_std_normal_cdf(-t), 1e-14));
    }
}

TEST_CASE("philox known answers")
{
    using B = Philox4x32::Block;
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("random streams are reproducible and independent")
{
    RandomSource a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i)
    {
        const auto x = a();
        REQUIRE(x == b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
    }
    CHECK(seen.size() == 3000);

    RandomSource g1(1, 0), g2(1, 0);
    for (int i = 0; i < 100; ++i)
        REQUIRE(g1.gaussian() == g2.gaussian());
}

TEST_CASE("random source moments")
{
    RandomSource rng(11, 0);
    const int n = 200000;
    double su = 0, sg = 0, sg2 = 0, sc = 0, bits = 0;
    std::uint64_t below_max = 0;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double g = rng.gaussian();
        sg += g;
        sg2 += g * g;
        sc += std::norm(complex_gaussian(rng, 2.5));
        bits += rng.bit();
        below_max = std::max(below_max, rng.below(7));
    }
    CHECK_THAT(su / n, WithinAbs(0.5, 0.005));
    CHECK_THAT(sg / n, WithinAbs(0.0, 0.01));
    CHECK_THAT(sg2 / n, WithinAbs(1.0, 0.01));
    CHECK_THAT(sc / n, WithinRel(2.5, 0.01));
    CHECK_THAT(bits / n, WithinAbs(0.5, 0.005));
    CHECK(below_max == 6);
    CHECK_THROWS_AS(complex_gaussian(rng, 0.0), DomainError);
}

TEST_CASE("tabulated log Phi tracks the direct evaluation")
{
    double worst = 0.0;
    for (double t = -45.0; t < 12.0; t += 3.7e-4)
        worst = std::max(worst, std::abs(log_std_normal_cdf_fast(t) - log_std_normal_cdf(t)));
    CHECK(worst < 5e-13);
    CHECK(log_std_normal_cdf_fast(-100.0) == log_std_normal_cdf(-100.0));
    CHECK(log_std_normal_cdf_fast(40.0) == log_std_normal_cdf(40.0));
    CHECK(std::isnan(log_std_normal_cdf_fast(std::nan(""))));
}
