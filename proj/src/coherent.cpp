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

#include "qdiff/coherent.hpp"

#include <cmath>
#include <string>

#include "qdiff/error.hpp"
#include "qdiff/statmath.hpp"

namespace qdiff
{
    CMatrix dft_pilots(std::size_t num_tx, std::size_t pilot_len)
    {
        if (num_tx == 0 || pilot_len < num_tx)
            throw ConfigError("pilot length must be at least K for a full-rank pilot matrix");
        const auto K = static_cast<Eigen::Index>(num_tx);
        const auto P = static_cast<Eigen::Index>(pilot_len);
        CMatrix X(K, P);
        const double scale = 1.0 / std::sqrt(static_cast<double>(num_tx));
        // fixed QPSK scrambler, so a long preamble is white in time
        RandomSource rng(0x9e3779b97f4a7c15ull, 0);
        for (Eigen::Index t = 0; t < P; ++t)
        {
            const cplx c = std::polar(1.0, pi / 4.0 + pi / 2.0 * static_cast<double>(rng() >> 62));
            for (Eigen::Index k = 0; k < K; ++k)
            {
                const auto m = static_cast<double>((k * (t % K)) % K);
                X(k, t) = scale * c * std::polar(1.0, -2.0 * pi * m / static_cast<double>(K));
            }
        }
        return X;
    }

    PilotPlan make_pilot_plan(std::size_t num_uses, std::size_t num_tx, double fraction, std::size_t pilot_len,
                              std::size_t data_granularity)
    {
        if (!(fraction > 0.0 && fraction < 1.0))
            throw ConfigError("pilot fraction must lie in (0, 1)");
        if (pilot_len < num_tx)
            throw ConfigError("pilot length must be at least K for a full-rank pilot matrix");
        PilotPlan p;
        p.fraction = fraction;
        p.num_uses = num_uses;
        p.num_tx = num_tx;
        p.pilot_len = pilot_len;
        p.block_len = static_cast<std::size_t>(std::lround(static_cast<double>(pilot_len) / fraction));
        if (p.block_len <= pilot_len || num_uses % p.block_len != 0)
            throw ConfigError("pilot blocks of " + std::to_string(p.block_len) + " uses do not tile N = " +
                              std::to_string(num_uses));
        if (data_granularity == 0 || (p.block_len - pilot_len) % data_granularity != 0)
            throw ConfigError("data part of a pilot block must be a multiple of N_d");
        for (std::size_t b = 0; b < p.num_blocks(); ++b)
            for (std::size_t t = 0; t < pilot_len; ++t)
                p.positions.push_back(b * p.block_len + t);
        p.pilot_symbols = dft_pilots(num_tx, pilot_len);
        return p;
    }

    CMatrix ls_channel_estimate(const CMatrix &q_pilots, const CMatrix &pilots)
    {
        if (q_pilots.cols() != pilots.cols())
            throw ShapeError("ls_channel_estimate: pilot length mismatch");
        const CMatrix gram = pilots * pilots.adjoint();
        Eigen::FullPivLU<CMatrix> lu(gram);
        lu.setThreshold(1e-10);
        if (lu.rank() < gram.rows())
            throw DetectionError("ls_channel_estimate: pilot matrix is rank deficient");
        // G is Hermitian, so H^^H = G^{-1} X Q^H
        return lu.solve(pilots * q_pilots.adjoint()).adjoint();
    }

    std::size_t coherent_data_blocks(const PilotPlan &plan, const DispersionSet &disp)
    {
        return plan.num_blocks() * (plan.data_len() / disp.block_len);
    }

    CMatrix coherent_frame(const CMatrix &symbols, const PilotPlan &plan, const DispersionSet &disp)
    {
        const std::size_t per_block = plan.data_len() / disp.block_len;
        if (static_cast<std::size_t>(symbols.cols()) != plan.num_blocks() * per_block ||
            static_cast<std::size_t>(symbols.rows()) != disp.num_symbols)
            throw ShapeError("coherent_frame: symbol matrix does not match the pilot plan");
        if (disp.block_len != plan.num_tx)
            throw ConfigError("coherent_frame: square codes need K = N_d");
        const auto K = static_cast<Eigen::Index>(plan.num_tx);
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        CMatrix X(K, static_cast<Eigen::Index>(plan.num_uses));
        std::vector<cplx> s(disp.num_symbols);
        Eigen::Index col = 0, blk = 0;
        for (std::size_t b = 0; b < plan.num_blocks(); ++b)
        {
            X.middleCols(col, static_cast<Eigen::Index>(plan.pilot_len)) = plan.pilot_symbols;
            col += static_cast<Eigen::Index>(plan.pilot_len);
            for (std::size_t d = 0; d < per_block; ++d, ++blk)
            {
                for (std::size_t n = 0; n < s.size(); ++n)
                    s[n] = symbols(static_cast<Eigen::Index>(n), blk);
                X.middleCols(col, nd) = build_data_matrix(s, disp);
                col += nd;
            }
        }
        return X;
    }

    std::vector<std::size_t> coherent_ml_detect(const CMatrix &q_curr, const CMatrix &h_hat, double rho,
                                                const DpskDetector &detector)
    {
        return detector.ml_one_bit({h_hat, q_curr, rho});
    }
}
