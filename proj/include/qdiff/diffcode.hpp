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

#ifndef QDIFF_DIFFCODE_HPP
#define QDIFF_DIFFCODE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qdiff/types.hpp"

namespace qdiff
{
    /// M-PSK with Gray labels. Point i sits at angle 2 pi i / M and carries label i ^ (i >> 1).
    struct PskConstellation
    {
        std::size_t order = 0;     // M
        unsigned bits = 0;         // log2(M)
        std::vector<cplx> points;  // unit modulus
        std::vector<unsigned> labels;
        std::vector<std::size_t> index_of_label;

        cplx point_of_label(unsigned label) const { return points[index_of_label[label]]; }
        /// Nearest point; lowest index on ties. Zero maps to index 0.
        std::size_t nearest(cplx z) const;
    };

    /// Throws DomainError unless M is a power of two, 2 <= M <= 2^16.
    PskConstellation make_psk(std::size_t order);

    /// Upsilon: log2(M) bits, most significant first, to a PSK symbol.
    cplx psk_map(std::span<const int> bits, const PskConstellation &psk);

    /// Upsilon^-1 with nearest-point resolution for off-grid input.
    std::vector<int> psk_demap(cplx symbol, const PskConstellation &psk);

    void label_to_bits(unsigned label, unsigned nbits, std::span<int> out);
    unsigned bits_to_label(std::span<const int> bits);

    /// Dispersion matrices of a square orthogonal space-time code:
    /// S = N_s^{-1/2} sum_n (A_n s_n + B_n s_n^*).
    struct DispersionSet
    {
        std::size_t num_symbols = 0; // N_s
        std::size_t block_len = 0;   // N_d
        std::vector<CMatrix> A, B;
    };

    /// The 2 x 2 Alamouti set. The orthogonality identity is checked numerically before returning.
    DispersionSet alamouti_dispersion();

    /// Largest deviation of Gamma^H Gamma from ||q||^2 I over `trials` random complex q.
    double orthogonality_defect(const DispersionSet &disp, std::size_t trials, std::uint64_t seed);

    /// Throws ConfigError if the identity Gamma^H Gamma = ||q||^2 I fails beyond 1e-10 (relative).
    void verify_dispersion(const DispersionSet &disp);

    /// A~ = [A_0^T q, ..., A_{Ns-1}^T q] and B~ likewise (N_d x N_s each).
    void composite_columns(const DispersionSet &disp, const CVector &q, CMatrix &At, CMatrix &Bt);

    /// Gamma = [[A~, B~], [B~^*, A~^*]], 2N_d x 2N_s.
    CMatrix gamma_matrix(const DispersionSet &disp, const CVector &q);

    /// Throws DomainError if any |s| deviates from 1 by more than 1e-9.
    CMatrix build_data_matrix(std::span<const cplx> s, const DispersionSet &disp);

    /// Differential encoding C[v'] = C[v'-1] S[v'] with C[-1] = I, concatenated to K x (blocks * N_d).
    /// `symbols` holds one column of N_s symbols per block.
    CMatrix diff_encode(const CMatrix &symbols, const DispersionSet &disp);

    /// SC: X = C. OFDM: each row goes through the inverse unitary DFT (no prefix).
    CMatrix to_transmit(const CMatrix &C, Mode mode);

    struct DapskState
    {
        double ring_ratio = 2.0; // a
        double psi0 = 0.0, psi1 = 0.0;
        cplx prev_code{1.0, 0.0}; // c[v-1]
        double prev_amp = 0.0;    // |x[v-1]|
    };

    /// psi0 = sqrt(2 / (a^2 + 1)), psi1 = a psi0. Reference symbol x[0] = psi0 (c[0] = 1).
    /// Throws DomainError unless a > 1.
    DapskState dapsk_initial_state(double ring_ratio);

    /// Amplitude transition ratios in candidate order {1, a, 1/a}.
    inline std::vector<double> dapsk_ratios(double a) { return {1.0, a, 1.0 / a}; }

    /// Encodes N_b = 1 + log2(M) bits (b1 first) and advances the state.
    cplx dapsk_encode(std::span<const int> bits, const PskConstellation &psk, DapskState &state);
}

#endif
