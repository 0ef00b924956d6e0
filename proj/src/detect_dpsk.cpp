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

#include "qdiff/detect_dpsk.hpp"

#include <cmath>
#include <limits>

#include "qdiff/error.hpp"
#include "qdiff/statmath.hpp"

namespace qdiff
{
    namespace
    {
        double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

        void check_pair(const QuantizedBlockPair &pair, const DispersionSet &disp)
        {
            const auto nd = static_cast<Eigen::Index>(disp.block_len);
            if (pair.q_prev.cols() != nd || pair.q_curr.cols() != nd)
                throw ShapeError("DPSK detector: blocks must have N_d columns");
            if (pair.q_prev.rows() != pair.q_curr.rows() || pair.q_prev.rows() == 0)
                throw ShapeError("DPSK detector: antenna counts of the two blocks differ");
            if (!(pair.rho > 0.0))
                throw DomainError("DPSK detector: rho must be positive");
        }

        void check_one_bit(const CMatrix &q)
        {
            for (Eigen::Index i = 0; i < q.size(); ++i)
            {
                const cplx z = q(i);
                if (std::abs(z.real()) != 1.0 || std::abs(z.imag()) != 1.0)
                    throw DomainError("sign refinement needs one-bit labels in the current block");
            }
        }
    }

    RMatrix real_rows(const CMatrix &q_prev, const DispersionSet &disp)
    {
        const auto U = q_prev.rows();
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        const auto ns = static_cast<Eigen::Index>(disp.num_symbols);
        if (q_prev.cols() != nd)
            throw ShapeError("real_rows: block length mismatch");
        RMatrix rows(2 * U * nd, 4 * ns);
        CMatrix At, Bt;
        for (Eigen::Index u = 0; u < U; ++u)
        {
            composite_columns(disp, q_prev.row(u).transpose(), At, Bt);
            for (Eigen::Index l = 0; l < nd; ++l)
            {
                const Eigen::Index r = (u * nd + l) * 2;
                for (Eigen::Index n = 0; n < ns; ++n)
                {
                    const cplx fa = At(l, n), fb = Bt(l, n);
                    rows(r, n) = fa.real();
                    rows(r, ns + n) = fb.real();
                    rows(r, 2 * ns + n) = -fa.imag();
                    rows(r, 3 * ns + n) = -fb.imag();
                    rows(r + 1, n) = fa.imag();
                    rows(r + 1, ns + n) = fb.imag();
                    rows(r + 1, 2 * ns + n) = fa.real();
                    rows(r + 1, 3 * ns + n) = fb.real();
                }
            }
        }
        return rows;
    }

    RMatrix refine_rows(const QuantizedBlockPair &pair, const DispersionSet &disp)
    {
        check_pair(pair, disp);
        check_one_bit(pair.q_curr);
        RMatrix rows = real_rows(pair.q_prev, disp);
        const auto nd = static_cast<Eigen::Index>(disp.block_len);
        for (Eigen::Index u = 0; u < pair.q_curr.rows(); ++u)
            for (Eigen::Index l = 0; l < nd; ++l)
            {
                const Eigen::Index r = (u * nd + l) * 2;
                rows.row(r) *= sign_of(pair.q_curr(u, l).real());
                rows.row(r + 1) *= sign_of(pair.q_curr(u, l).imag());
            }
        return rows;
    }

    DpskDetector::DpskDetector(DispersionSet disp, PskConstellation psk) : disp_(std::move(disp)), psk_(std::move(psk))
    {
        verify_dispersion(disp_);
        const std::size_t ns = disp_.num_symbols;
        double count = std::pow(static_cast<double>(psk_.order), static_cast<double>(ns));
        if (count > 1 << 20)
            throw ConfigError("DPSK detector: candidate set M^N_s is too large to enumerate");
        const auto C = static_cast<Eigen::Index>(count);
        if (C == 0)
            throw ConfigError("DPSK detector: empty candidate set");
        const auto n = static_cast<Eigen::Index>(ns);
        cand_.resize(4 * n, C);
        for (Eigen::Index c = 0; c < C; ++c)
        {
            const auto idx = candidate_symbols(static_cast<std::size_t>(c));
            for (Eigen::Index k = 0; k < n; ++k)
            {
                const cplx s = psk_.points[idx[static_cast<std::size_t>(k)]];
                // s~ = [s; s^*]
                cand_(k, c) = s.real();
                cand_(n + k, c) = s.real();
                cand_(2 * n + k, c) = s.imag();
                cand_(3 * n + k, c) = -s.imag();
            }
        }
        a_entries_.resize(ns);
        b_entries_.resize(ns);
        for (std::size_t k = 0; k < ns; ++k)
            for (Eigen::Index i = 0; i < disp_.A[k].rows(); ++i)
                for (Eigen::Index j = 0; j < disp_.A[k].cols(); ++j)
                {
                    if (disp_.A[k](i, j) != 0.0)
                        a_entries_[k].push_back({i, j, disp_.A[k](i, j)});
                    if (disp_.B[k](i, j) != 0.0)
                        b_entries_[k].push_back({i, j, disp_.B[k](i, j)});
                }
    }

    std::vector<std::size_t> DpskDetector::candidate_symbols(std::size_t c) const
    {
        std::vector<std::size_t> idx(disp_.num_symbols);
        for (std::size_t k = disp_.num_symbols; k-- > 0;)
        {
            idx[k] = c % psk_.order;
            c /= psk_.order;
        }
        return idx;
    }

    std::vector<double> DpskDetector::ml_one_bit_scores(const QuantizedBlockPair &pair) const
    {
        const RMatrix rows = refine_rows(pair, disp_);
        const RMatrix args = rows * cand_;
        const double scale = std::sqrt(pair.rho / static_cast<double>(disp_.num_symbols));
        std::vector<double> scores(static_cast<std::size_t>(cand_.cols()), 0.0);
        for (Eigen::Index c = 0; c < args.cols(); ++c)
        {
            double acc = 0.0;
            for (Eigen::Index r = 0; r < args.rows(); ++r)
                acc += log_std_normal_cdf_fast(scale * args(r, c));
            scores[static_cast<std::size_t>(c)] = acc;
        }
        return scores;
    }

    std::vector<std::size_t> DpskDetector::ml_one_bit(const QuantizedBlockPair &pair) const
    {
        const auto scores = ml_one_bit_scores(pair);
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c)
            if (clearly_greater(scores[c], scores[best]))
                best = c;
        return candidate_symbols(best);
    }

    std::vector<std::size_t> DpskDetector::bin_ml(const QuantizedBlockPair &pair, const QuantizerSpec &spec) const
    {
        check_pair(pair, disp_);
        if (spec.passthrough())
            throw ConfigError("bin-probability ML needs a quantizer with finite labels");
        const RMatrix rows = real_rows(pair.q_prev, disp_);
        const RMatrix means = (rows * cand_) / std::sqrt(static_cast<double>(disp_.num_symbols));
        const double sr = std::sqrt(pair.rho);
        const auto nd = static_cast<Eigen::Index>(disp_.block_len);
        std::vector<std::size_t> bins(static_cast<std::size_t>(rows.rows()));
        for (Eigen::Index u = 0; u < pair.q_curr.rows(); ++u)
            for (Eigen::Index l = 0; l < nd; ++l)
            {
                const Eigen::Index r = (u * nd + l) * 2;
                bins[static_cast<std::size_t>(r)] = spec.bin_of_label(pair.q_curr(u, l).real());
                bins[static_cast<std::size_t>(r + 1)] = spec.bin_of_label(pair.q_curr(u, l).imag());
            }
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < means.cols(); ++c)
        {
            double acc = 0.0;
            for (Eigen::Index r = 0; r < means.rows(); ++r)
            {
                const std::size_t b = bins[static_cast<std::size_t>(r)];
                const double m = means(r, c);
                acc += log_std_normal_interval(sr * (spec.boundaries[b] - m), sr * (spec.boundaries[b + 1] - m));
            }
            if (clearly_greater(acc, best_score))
            {
                best_score = acc;
                best = static_cast<std::size_t>(c);
            }
        }
        return candidate_symbols(best);
    }

    void DpskDetector::combine(const QuantizedBlockPair &pair, CVector &r, double &energy) const
    {
        check_pair(pair, disp_);
        const std::size_t ns = disp_.num_symbols;
        r = CVector::Zero(static_cast<Eigen::Index>(ns));
        energy = pair.q_prev.squaredNorm();
        // r_n = sum_u q_prev^H conj(A_n) q_curr + q_prev^T B_n conj(q_curr)
        for (Eigen::Index u = 0; u < pair.q_prev.rows(); ++u)
            for (std::size_t n = 0; n < ns; ++n)
            {
                cplx acc = 0.0;
                for (const Entry &e : a_entries_[n])
                    acc += std::conj(e.value * pair.q_prev(u, e.row)) * pair.q_curr(u, e.col);
                for (const Entry &e : b_entries_[n])
                    acc += e.value * pair.q_prev(u, e.row) * std::conj(pair.q_curr(u, e.col));
                r(static_cast<Eigen::Index>(n)) += acc;
            }
    }

    std::vector<std::size_t> DpskDetector::decoupled(const QuantizedBlockPair &pair) const
    {
        CVector r;
        double energy = 0.0;
        combine(pair, r, energy);
        const double gain = energy / std::sqrt(static_cast<double>(disp_.num_symbols));
        std::vector<std::size_t> out(disp_.num_symbols);
        for (std::size_t n = 0; n < out.size(); ++n)
        {
            const cplx rn = r(static_cast<Eigen::Index>(n));
            std::size_t best = 0;
            double best_d = std::norm(rn - gain * psk_.points[0]);
            for (std::size_t m = 1; m < psk_.order; ++m)
            {
                const double d = std::norm(rn - gain * psk_.points[m]);
                if (clearly_less(d, best_d))
                {
                    best_d = d;
                    best = m;
                }
            }
            out[n] = best;
        }
        return out;
    }

    std::vector<std::size_t> ml_one_bit_detect(const QuantizedBlockPair &pair, const DispersionSet &disp,
                                               const PskConstellation &psk)
    {
        return DpskDetector(disp, psk).ml_one_bit(pair);
    }

    std::vector<std::size_t> decoupled_detect(const QuantizedBlockPair &pair, const DispersionSet &disp,
                                              const PskConstellation &psk)
    {
        return DpskDetector(disp, psk).decoupled(pair);
    }
}
