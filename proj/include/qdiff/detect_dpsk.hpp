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

#ifndef QDIFF_DETECT_DPSK_HPP
#define QDIFF_DETECT_DPSK_HPP

#include <cstddef>
#include <vector>

#include "qdiff/diffcode.hpp"
#include "qdiff/quantize.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    /// Quantized observations of two adjacent blocks, one row per antenna (U x N_d each).
    /// For the coherent receiver q_prev holds the channel estimate (U x K) instead.
    struct QuantizedBlockPair
    {
        CMatrix q_prev;
        CMatrix q_curr;
        double rho = 1.0; // 1 / sigma_w^2
    };

    /// Real-domain likelihood rows, (2 U N_d) x (4 N_s). Row (u * N_d + l) * 2 + i, i = 0 real, 1 imag:
    ///   i = 0: [Re f, -Im f],  i = 1: [Im f, Re f],  f = [A~ row l, B~ row l] built from q_prev.
    /// A row dotted with s~_R = [Re s~; Im s~] gives Re / Im of f^T s~.
    RMatrix real_rows(const CMatrix &q_prev, const DispersionSet &disp);

    /// real_rows with each row multiplied by the sign of the matching component of q_curr.
    /// Throws DomainError unless every component of q_curr is +-1.
    RMatrix refine_rows(const QuantizedBlockPair &pair, const DispersionSet &disp);

    /// Block detectors for one dispersion set and constellation. Candidate c encodes symbol
    /// indices (i_0, ..., i_{Ns-1}) as c = sum_n i_n M^{Ns-1-n}; ties go to the lowest c.
    class DpskDetector
    {
    public:
        DpskDetector(DispersionSet disp, PskConstellation psk);

        const DispersionSet &dispersion() const { return disp_; }
        const PskConstellation &constellation() const { return psk_; }
        std::size_t num_candidates() const { return static_cast<std::size_t>(cand_.cols()); }
        /// Column c is s~_R of candidate c (4 N_s rows).
        const RMatrix &candidates() const { return cand_; }
        std::vector<std::size_t> candidate_symbols(std::size_t c) const;

        /// argmax_c sum_rows log Phi(sqrt(rho / N_s) f~^T s~_R(c)). One-bit labels only.
        std::vector<std::size_t> ml_one_bit(const QuantizedBlockPair &pair) const;

        /// Per-candidate log-likelihoods of ml_one_bit.
        std::vector<double> ml_one_bit_scores(const QuantizedBlockPair &pair) const;

        /// Bin-probability ML for any scalar quantizer:
        /// sum log(Phi(sqrt(rho)(z_{b+1} - m)) - Phi(sqrt(rho)(z_b - m))), m = N_s^{-1/2} f^T s~.
        std::vector<std::size_t> bin_ml(const QuantizedBlockPair &pair, const QuantizerSpec &spec) const;

        /// Matched combining r = sum_u (A~_u^H q_u + B~_u^T q_u^*), E = sum_u ||q_prev,u||^2,
        /// then per symbol argmin |r_l - N_s^{-1/2} E s|.
        std::vector<std::size_t> decoupled(const QuantizedBlockPair &pair) const;

        /// r and E of the decoupled detector.
        void combine(const QuantizedBlockPair &pair, CVector &r, double &energy) const;

    private:
        struct Entry
        {
            Eigen::Index row, col;
            cplx value;
        };
        DispersionSet disp_;
        PskConstellation psk_;
        RMatrix cand_;
        std::vector<std::vector<Entry>> a_entries_, b_entries_;
    };

    std::vector<std::size_t> ml_one_bit_detect(const QuantizedBlockPair &pair, const DispersionSet &disp,
                                               const PskConstellation &psk);
    std::vector<std::size_t> decoupled_detect(const QuantizedBlockPair &pair, const DispersionSet &disp,
                                              const PskConstellation &psk);
}

#endif
