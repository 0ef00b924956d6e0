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

#ifndef QDIFF_COHERENT_HPP
#define QDIFF_COHERENT_HPP

#include <cstddef>
#include <vector>

#include "qdiff/detect_dpsk.hpp"
#include "qdiff/diffcode.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    /// Pilot layout of the coherent reference system. The frame is cut into blocks of block_len uses;
    /// each block starts with pilot_len pilot uses followed by data. The estimate from a block's preamble
    /// is used for the data of that block.
    struct PilotPlan
    {
        double fraction = 0.125; // xi
        std::size_t num_uses = 0;
        std::size_t num_tx = 0;
        std::size_t pilot_len = 0;
        std::size_t block_len = 0;
        std::vector<std::size_t> positions;
        CMatrix pilot_symbols; // K x pilot_len, unit power per use

        std::size_t num_blocks() const { return num_uses / block_len; }
        std::size_t data_len() const { return block_len - pilot_len; }
    };

    /// Columns of the K x K DFT cycled over the pilot uses and scrambled by a fixed QPSK sequence c_t:
    /// X(k, t) = K^{-1/2} c_t exp(-j 2 pi k (t mod K) / K). Rows are orthogonal when K divides P.
    CMatrix dft_pilots(std::size_t num_tx, std::size_t pilot_len);

    /// block_len = round(pilot_len / fraction). Throws ConfigError unless the blocks tile the frame, the data
    /// part of each block is a multiple of data_granularity and pilot_len >= K.
    PilotPlan make_pilot_plan(std::size_t num_uses, std::size_t num_tx, double fraction, std::size_t pilot_len,
                              std::size_t data_granularity);

    /// H^ = Q X^H (X X^H)^{-1} for Q = H X (U x P observations). Throws DetectionError if X is rank deficient.
    CMatrix ls_channel_estimate(const CMatrix &q_pilots, const CMatrix &pilots);

    /// Non-differential space-time frame: pilots then data matrices S in every block. `symbols` has one column
    /// of N_s symbols per data block, blocks ordered through the frame.
    CMatrix coherent_frame(const CMatrix &symbols, const PilotPlan &plan, const DispersionSet &disp);

    /// Number of space-time data blocks per frame.
    std::size_t coherent_data_blocks(const PilotPlan &plan, const DispersionSet &disp);

    /// One-bit ML with the refined rows built from the channel estimate (U x K) in place of the previous block.
    std::vector<std::size_t> coherent_ml_detect(const CMatrix &q_curr, const CMatrix &h_hat, double rho,
                                                const DpskDetector &detector);
}

#endif
