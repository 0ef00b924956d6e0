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

#include "qdiff/diffcode.hpp"

#include <algorithm>
#include <string>

#include "qdiff/error.hpp"
#include "qdiff/fft.hpp"
#include "qdiff/statmath.hpp"

namespace qdiff
{
    PskConstellation make_psk(std::size_t order)
    {
        if (order < 2 || order > (1u << 16) || (order & (order - 1)) != 0)
            throw DomainError("make_psk: order must be a power of two in [2, 65536], got " + std::to_string(order));
        PskConstellation psk;
        psk.order = order;
        while ((std::size_t{1} << psk.bits) < order)
            ++psk.bits;
        psk.points.resize(order);
        psk.labels.resize(order);
        psk.index_of_label.resize(order);
        for (std::size_t i = 0; i < order; ++i)
        {
            // exact values on the axes keep BPSK / QPSK arithmetic clean
            const std::size_t quarter = 4 * i;
            if (quarter % order == 0)
            {
                static const cplx axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                psk.points[i] = axis[(quarter / order) % 4];
            }
            else
                psk.points[i] = std::polar(1.0, 2.0 * pi * static_cast<double>(i) / static_cast<double>(order));
            psk.labels[i] = static_cast<unsigned>(i ^ (i >> 1));
            psk.index_of_label[psk.labels[i]] = i;
        }
        return psk;
    }

    std::size_t PskConstellation::nearest(cplx z) const
    {
        std::size_t best = 0;
        double best_d = std::norm(z - points[0]);
        for (std::size_t i = 1; i < order; ++i)
        {
            const double d = std::norm(z - points[i]);
            if (clearly_less(d, best_d))
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    void label_to_bits(unsigned label, unsigned nbits, std::span<int> out)
    {
        if (out.size() != nbits)
            throw ShapeError("label_to_bits: output span has the wrong length");
        for (unsigned b = 0; b < nbits; ++b)
            out[b] = static_cast<int>((label >> (nbits - 1 - b)) & 1u);
    }

    unsigned bits_to_label(std::span<const int> bits)
    {
        unsigned label = 0;
        for (int b : bits)
        {
            if (b != 0 && b != 1)
                throw DomainError("bits_to_label: bits must be 0 or 1");
            label = (label << 1) | static_cast<unsigned>(b);
        }
        return label;
    }

    cplx psk_map(std::span<const int> bits, const PskConstellation &psk)
    {
        if (bits.size() != psk.bits)
            throw DomainError("psk_map: expected " + std::to_string(psk.bits) + " bits");
        return psk.point_of_label(bits_to_label(bits));
    }

    std::vector<int> psk_demap(cplx symbol, const PskConstellation &psk)
    {
        std::vector<int> bits(psk.bits);
        label_to_bits(psk.labels[psk.nearest(symbol)], psk.bits, bits);
        return bits;
    }

    DispersionSet alamouti_dispersion()
    {
        DispersionSet d;
        d.num_symbols = 2;
        d.block_len = 2;
        CMatrix a1 = CMatrix::Zero(2, 2), a2 = CMatrix::Zero(2, 2), b1 = CMatrix::Zero(2, 2), b2 = CMatrix::Zero(2, 2);
        a1(0, 0) = 1.0;
        a2(0, 1) = 1.0;
        b1(1, 1) = 1.0;
        b2(1, 0) = -1.0;
        d.A = {a1, a2};
        d.B = {b1, b2};
        verify_dispersion(d);
        return d;
    }

    void composite_columns(const DispersionSet &disp, const CVector &q, CMatrix &At, CMatrix &Bt)
    {
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        const auto ns = static_cast<Eigen::Index>(disp.num_symbols);
        if (q.size() != nd)
            throw ShapeError("composite_columns: block length mismatch");
        At.resize(nd, ns);
        Bt.resize(nd, ns);
        for (Eigen::Index n = 0; n < ns; ++n)
        {
            At.col(n) = disp.A[static_cast<std::size_t>(n)].transpose() * q;
            Bt.col(n) = disp.B[static_cast<std::size_t>(n)].transpose() * q;
        }
    }

    CMatrix gamma_matrix(const DispersionSet &disp, const CVector &q)
    {
        CMatrix At, Bt;
        composite_columns(disp, q, At, Bt);
        const Eigen::Index nd = At.rows(), ns = At.cols();
        CMatrix g(2 * nd, 2 * ns);
        g.topLeftCorner(nd, ns) = At;
        g.topRightCorner(nd, ns) = Bt;
        g.bottomLeftCorner(nd, ns) = Bt.conjugate();
        g.bottomRightCorner(nd, ns) = At.conjugate();
        return g;
    }

    double orthogonality_defect(const DispersionSet &disp, std::size_t trials, std::uint64_t seed)
    {
        RandomSource rng(seed, 0);
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        double worst = 0.0;
        for (std::size_t t = 0; t < trials; ++t)
        {
            CVector q(nd);
            for (Eigen::Index i = 0; i < nd; ++i)
                q(i) = complex_gaussian(rng, 1.0);
            const CMatrix g = gamma_matrix(disp, q);
            const CMatrix gram = g.adjoint() * g;
            const CMatrix target = q.squaredNorm() * CMatrix::Identity(gram.rows(), gram.cols());
            worst = std::max(worst, (gram - target).cwiseAbs().maxCoeff());
        }
        return worst;
    }

    void verify_dispersion(const DispersionSet &disp)
    {
        if (disp.num_symbols == 0 || disp.block_len == 0 || disp.A.size() != disp.num_symbols ||
            disp.B.size() != disp.num_symbols)
            throw ConfigError("dispersion set: inconsistent sizes");
        for (std::size_t n = 0; n < disp.num_symbols; ++n)
        {
            const auto nd = static_cast<Eigen::Index>(disp.block_len);
            if (disp.A[n].rows() != nd || disp.A[n].cols() != nd || disp.B[n].rows() != nd || disp.B[n].cols() != nd)
                throw ConfigError("dispersion set: matrices must be N_d x N_d");
        }
        if (orthogonality_defect(disp, 16, 0x5eed) > 1e-10)
            throw ConfigError("dispersion set violates the orthogonality identity");
    }

    CMatrix build_data_matrix(std::span<const cplx> s, const DispersionSet &disp)
    {
        if (s.size() != disp.num_symbols)
            throw ShapeError("build_data_matrix: expected N_s symbols");
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        CMatrix S = CMatrix::Zero(nd, nd);
        for (std::size_t n = 0; n < s.size(); ++n)
        {
            if (std::abs(std::abs(s[n]) - 1.0) > 1e-9)
                throw DomainError("build_data_matrix: symbols must have unit modulus");
            S += disp.A[n] * s[n] + disp.B[n] * std::conj(s[n]);
        }
        return S / std::sqrt(static_cast<double>(disp.num_symbols));
    }

    CMatrix diff_encode(const CMatrix &symbols, const DispersionSet &disp)
    {
        if (static_cast<std::size_t>(symbols.rows()) != disp.num_symbols)
            throw ShapeError("diff_encode: symbol matrix must have N_s rows");
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        const Eigen::Index blocks = symbols.cols();
        CMatrix out(nd, blocks * nd);
        CMatrix C = CMatrix::Identity(nd, nd);
        std::vector<cplx> s(disp.num_symbols);
        for (Eigen::Index b = 0; b < blocks; ++b)
        {
            for (std::size_t n = 0; n < s.size(); ++n)
                s[n] = symbols(static_cast<Eigen::Index>(n), b);
            C = (C * build_data_matrix(s, disp)).eval();
            out.middleCols(b * nd, nd) = C;
        }
        return out;
    }

    CMatrix to_transmit(const CMatrix &C, Mode mode)
    {
        if (mode == Mode::SingleCarrier)
            return C;
        CMatrix X(C.rows(), C.cols());
        const auto n = static_cast<std::size_t>(C.cols());
        std::vector<cplx> row(n), out(n);
        for (Eigen::Index k = 0; k < C.rows(); ++k)
        {
            for (std::size_t i = 0; i < n; ++i)
                row[i] = C(k, static_cast<Eigen::Index>(i));
            unitary_dft(row, out, true);
            for (std::size_t i = 0; i < n; ++i)
                X(k, static_cast<Eigen::Index>(i)) = out[i];
        }
        return X;
    }

    DapskState dapsk_initial_state(double ring_ratio)
    {
        if (!(ring_ratio > 1.0) || !std::isfinite(ring_ratio))
            throw DomainError("DAPSK ring ratio must be a finite value > 1");
        DapskState st;
        st.ring_ratio = ring_ratio;
        st.psi0 = std::sqrt(2.0 / (ring_ratio * ring_ratio + 1.0));
        st.psi1 = ring_ratio * st.psi0;
        st.prev_code = 1.0;
        st.prev_amp = st.psi0;
        return st;
    }

    cplx dapsk_encode(std::span<const int> bits, const PskConstellation &psk, DapskState &state)
    {
        if (bits.size() != 1 + psk.bits)
            throw DomainError("dapsk_encode: expected " + std::to_string(1 + psk.bits) + " bits");
        if (bits[0] != 0 && bits[0] != 1)
            throw DomainError("dapsk_encode: bits must be 0 or 1");
        const cplx s = psk_map(bits.subspan(1), psk);
        state.prev_code *= s;
        // renormalise so the unit-modulus code does not drift over long frames
        state.prev_code /= std::abs(state.prev_code);
        if (bits[0] == 1)
            state.prev_amp = (state.prev_amp == state.psi0) ? state.psi1 : state.psi0;
        return state.prev_amp * state.prev_code;
    }
}
