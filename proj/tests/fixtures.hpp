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

// Random detector instances shared by the unit and acceptance tests.

#ifndef QDIFF_TEST_FIXTURES_HPP
#define QDIFF_TEST_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "qdiff/detect_dapsk.hpp"
#include "qdiff/detect_dpsk.hpp"
#include "qdiff/diffcode.hpp"
#include "qdiff/quantize.hpp"
#include "qdiff/statmath.hpp"

namespace fixture
{
    using namespace qdiff;

    struct DpskInstance
    {
        QuantizedBlockPair pair;
        std::vector<std::size_t> truth;
    };

    // Two adjacent Alamouti blocks through a flat U x 2 Rayleigh channel, unit receive power.
    // one_bit quantizes both blocks after gain control.
    inline DpskInstance dpsk_instance(RandomSource &rng, const PskConstellation &psk, const DispersionSet &disp,
                                      std::size_t U, double snr_db, bool one_bit_adc)
    {
        const double nv = std::pow(10.0, -snr_db / 10.0);
        const auto Ui = static_cast<Eigen::Index>(U);
        CMatrix H(Ui, 2), Zp(Ui, 2), Zc(Ui, 2);
        for (auto &h : H.reshaped())
            h = complex_gaussian(rng, 1.0);
        DpskInstance inst;
        inst.truth = {rng.below(psk.order), rng.below(psk.order)};
        const cplx prev_s[2] = {psk.points[rng.below(psk.order)], psk.points[rng.below(psk.order)]};
        const cplx s[2] = {psk.points[inst.truth[0]], psk.points[inst.truth[1]]};
        const CMatrix Cp = build_data_matrix(prev_s, disp);
        const CMatrix Cc = Cp * build_data_matrix(s, disp);
        for (auto &z : Zp.reshaped())
            z = complex_gaussian(rng, nv);
        for (auto &z : Zc.reshaped())
            z = complex_gaussian(rng, nv);
        CMatrix Yp = H * Cp + Zp, Yc = H * Cc + Zc;
        const double eta = std::sqrt(4.0 / pi), eps = 2.0 - 4.0 / pi;
        if (one_bit_adc)
        {
            const double g = 1.0 / std::sqrt(1.0 + nv);
            Yp = Yp.unaryExpr([g](cplx y) { return one_bit(g * y); });
            Yc = Yc.unaryExpr([g](cplx y) { return one_bit(g * y); });
            const double nz = nv * g * g;
            inst.pair.rho = 1.0 / (2.0 * eta * eta * nz + 2.0 * eps);
        }
        else
            inst.pair.rho = 1.0 / (2.0 * nv);
        inst.pair.q_prev = Yp;
        inst.pair.q_curr = Yc;
        return inst;
    }

    struct DapskInstance
    {
        DapskObservation obs;
        std::size_t amp_index = 0; // into {1, a, 1/a}
        std::size_t symbol = 0;
    };

    // One-bit spec carrying the closed-form Bussgang pair for unit-power input.
    inline QuantizerSpec one_bit_closed_form()
    {
        QuantizerSpec s = one_bit_spec();
        s.eta = std::sqrt(4.0 / pi);
        s.noise_var = 2.0 - 4.0 / pi;
        s.calibrated = true;
        return s;
    }

    // Two consecutive DAPSK uses through a flat SIMO channel, quantized with `spec` after gain control
    // (a pass-through spec leaves them unquantized and skips the gain control).
    inline DapskInstance dapsk_instance(RandomSource &rng, const PskConstellation &psk, double a, std::size_t U,
                                        double snr_db, const QuantizerSpec &spec)
    {
        const double nv = std::pow(10.0, -snr_db / 10.0);
        const auto st = dapsk_initial_state(a);
        DapskInstance inst;
        const bool outer = rng.bit() != 0;
        const bool flip = rng.bit() != 0;
        const double prev_amp = outer ? st.psi1 : st.psi0;
        const double amp = flip ? (outer ? st.psi0 : st.psi1) : prev_amp;
        inst.amp_index = !flip ? 0 : (outer ? 2 : 1);
        inst.symbol = rng.below(psk.order);
        const cplx x_prev = prev_amp * std::polar(1.0, 2.0 * pi * rng.uniform());
        const cplx x_curr = amp / prev_amp * psk.points[inst.symbol] * x_prev;
        const auto Ui = static_cast<Eigen::Index>(U);
        CVector qp(Ui), qc(Ui);
        const double g = spec.passthrough() ? 1.0 : 1.0 / std::sqrt(1.0 + nv);
        for (Eigen::Index u = 0; u < Ui; ++u)
        {
            const cplx h = complex_gaussian(rng, 1.0);
            const cplx zp = nv > 0.0 ? complex_gaussian(rng, nv) : cplx{};
            const cplx zc = nv > 0.0 ? complex_gaussian(rng, nv) : cplx{};
            qp(u) = quantize_complex(g * (h * x_prev + zp), spec);
            qc(u) = quantize_complex(g * (h * x_curr + zc), spec);
        }
        inst.obs.q_prev = qp;
        inst.obs.q_curr = qc;
        if (nv * g * g * spec.eta * spec.eta + spec.noise_var > 0.0)
            inst.obs.rho_set = dapsk_rho_set(spec.eta, nv * g * g, spec.noise_var, a);
        else
            inst.obs.rho_set = {1e12, 1e12, 1e12};
        return inst;
    }
}

#endif
