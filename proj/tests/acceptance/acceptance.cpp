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

// Acceptance run: one PASS/FAIL line per criterion. Arguments select a subset, e.g. "acceptance 6 7".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qdiff/config.hpp"
#include "qdiff/detect_dapsk.hpp"
#include "qdiff/detect_dpsk.hpp"
#include "qdiff/diffcode.hpp"
#include "qdiff/quantize.hpp"
#include "qdiff/simulate.hpp"

using namespace qdiff;

namespace
{
    constexpr double inf = std::numeric_limits<double>::infinity();

    struct Outcome
    {
        bool pass = true;
        std::string detail;

        void check(bool ok, const std::string &what)
        {
            pass = pass && ok;
            if (!ok)
                note("violated: " + what);
        }
        void note(const std::string &s) { detail += (detail.empty() ? "" : "; ") + s; }
    };

    std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, a, b, c, d);
        return buf;
    }

    /// Bit error rate over independent frames with the standard error of the frame-level mean.
    struct Rate
    {
        double ber = 0.0, se = 0.0;
        std::uint64_t errors = 0, bits = 0;
    };

    Rate frame_rate(const Simulator &sim, double snr_db, std::size_t trials, bool amplitude = false)
    {
        const auto op = sim.prepare(snr_db);
        double s1 = 0.0, s2 = 0.0;
        Rate r;
        for (std::size_t t = 0; t < trials; ++t)
        {
            const auto c = sim.run_trial(op, t);
            const auto e = amplitude ? c.amp_bit_errors : c.bit_errors;
            const auto b = amplitude ? c.amp_bits : c.bits;
            const double x = static_cast<double>(e) / static_cast<double>(b);
            s1 += x;
            s2 += x * x;
            r.errors += e;
            r.bits += b;
        }
        const double n = static_cast<double>(trials), mean = s1 / n;
        r.ber = static_cast<double>(r.errors) / static_cast<double>(r.bits);
        r.se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1.0));
        return r;
    }

    SimConfig fig1_config(std::size_t U)
    {
        SimConfig c;
        c.scheme = Scheme::Dpsk;
        c.detector = Detector::Decoupled;
        c.num_rx = U;
        c.num_tx = 2;
        c.num_uses = 256;
        c.psk_order = 8;
        c.adc_bits = 1;
        c.tau_rms = 50e-9; // L = 11 at Ts = 50 ns
        c.seed = 2024;
        c.threads = 1;
        return c;
    }

    SimConfig dapsk_config(std::size_t U, Detector d, unsigned adc_bits)
    {
        SimConfig c;
        c.scheme = Scheme::Dapsk;
        c.detector = d;
        c.num_rx = U;
        c.num_tx = 1;
        c.num_symbols = 1;
        c.block_len = 1;
        c.num_uses = 256;
        c.psk_order = 8;
        c.ring_ratio = 2.0;
        c.adc_bits = adc_bits;
        c.tau_rms = 50e-9;
        c.phase_detector = PhaseDetector::InverseDecoding;
        c.threshold_trials = 10000;
        c.seed = 4096;
        c.threads = 1;
        return c;
    }

    Outcome criterion1()
    {
        Outcome o;
        const double defect = orthogonality_defect(alamouti_dispersion(), 1000, 1);
        o.note(fmt("max defect %.3g", defect));
        o.check(defect <= 1e-10, "defect <= 1e-10");
        return o;
    }

    Outcome criterion2()
    {
        Outcome o;
        const auto disp = alamouti_dispersion();
        const auto psk4 = make_psk(4);
        const DpskDetector det(disp, psk4);
        auto index = [](const std::vector<std::size_t> &s, std::size_t M) { return s[0] * M + s[1]; };

        std::size_t agree = 0;
        RandomSource r1(10, 0);
        for (int t = 0; t < 500; ++t)
        {
            const auto inst = fixture::dpsk_instance(r1, psk4, disp, 8, -3.0 + 0.02 * t, t % 2 == 1);
            agree += index(det.decoupled(inst.pair), 4) ==
                     oracle::argmax_lowest(oracle::dpsk_joint_scores(inst.pair.q_prev, inst.pair.q_curr, psk4.points));
        }
        o.note(fmt("decoupled vs joint %.0f/500", static_cast<double>(agree)));
        o.check(agree == 500, "decoupled agreement 100%");

        agree = 0;
        RandomSource r2(11, 0);
        for (int t = 0; t < 500; ++t)
        {
            const auto inst = fixture::dpsk_instance(r2, psk4, disp, 8, -5.0 + 0.06 * t, true);
            const auto scores = oracle::dpsk_ml_scores(inst.pair.q_prev, inst.pair.q_curr, inst.pair.rho, psk4.points);
            agree += index(det.ml_one_bit(inst.pair), 4) == oracle::argmax_lowest(scores);
        }
        o.note(fmt("dpsk ML vs grid %.0f/500", static_cast<double>(agree)));
        o.check(agree == 500, "dpsk ML agreement 100%");

        agree = 0;
        const auto psk8 = make_psk(8);
        const auto spec = fixture::one_bit_closed_form();
        RandomSource r3(20, 0);
        for (int t = 0; t < 500; ++t)
        {
            const auto inst = fixture::dapsk_instance(r3, psk8, 2.0, 8, -5.0 + 0.06 * t, spec);
            const double rho[3] = {inst.obs.rho_set[0], inst.obs.rho_set[1], inst.obs.rho_set[2]};
            const auto scores = oracle::dapsk_ml_scores(inst.obs.q_prev, inst.obs.q_curr, rho, 2.0, psk8.points);
            const auto d = ml_one_bit_dapsk(inst.obs, psk8, 2.0);
            agree += d.amp_index * 8 + d.symbol == oracle::argmax_lowest(scores);
        }
        o.note(fmt("dapsk ML vs grid %.0f/500", static_cast<double>(agree)));
        o.check(agree == 500, "dapsk ML agreement 100%");
        return o;
    }

    Outcome criterion3()
    {
        Outcome o;
        RandomSource rng(3, 0);
        const auto bp = bussgang_calibrate(one_bit_spec(), 1.0, rng, 1000000);
        const double eta = std::sqrt(4.0 / pi), eps = 2.0 - 4.0 / pi;
        const double de = std::abs(bp.eta / eta - 1.0), dn = std::abs(bp.noise_var / eps - 1.0);
        o.note(fmt("eta %.5f (%.3g rel), sigma_eps^2 %.5f (%.3g rel)", bp.eta, de, bp.noise_var, dn));
        o.check(de <= 0.01, "eta within 1%");
        o.check(dn <= 0.02, "sigma_eps^2 within 2%");
        return o;
    }

    Outcome criterion4()
    {
        Outcome o;
        RandomSource rng(99, 0);
        const auto spec = calibrated(dapsk_two_bit_spec(2.0), 1.0, rng, 1000000);
        const auto st = dapsk_initial_state(2.0);
        double worst = 0.0;
        for (std::size_t U : {42u, 126u, 512u})
            for (double snr : {0.0, 10.0, 20.0})
            {
                const double nv = std::pow(10.0, -snr / 10.0), g2 = 1.0 / (1.0 + nv);
                EnergyModel m;
                m.eta = spec.eta;
                m.composite_noise = spec.eta * spec.eta * nv * g2 + spec.noise_var;
                m.alpha2 = g2;
                m.num_rx = U;
                m.psi0 = st.psi0;
                m.psi1 = st.psi1;
                const auto lo = energy_moments(m, m.psi0), hi = energy_moments(m, m.psi1);
                const double ref = oracle::bisect(
                    [&](double x) {
                        return oracle::gaussian_log_pdf(x, hi.mean, hi.var) -
                               oracle::gaussian_log_pdf(x, lo.mean, lo.var);
                    },
                    lo.mean, hi.mean);
                worst = std::max(worst, std::abs(amplitude_threshold(m) - ref));
            }
        o.note(fmt("worst |gamma - bisection| %.3g", worst));
        o.check(worst <= 1e-6, "analytic gamma within 1e-6");

        SimConfig c = dapsk_config(256, Detector::Energy, 2);
        c.threshold_trials = 20000;
        const auto rows = threshold_table(c, {256}, {10.0});
        const double rel = std::abs(rows[0].gamma_mc / rows[0].gamma_analytic - 1.0);
        o.note(fmt("U=256 10 dB: MC %.5f analytic %.5f (%.3g rel)", rows[0].gamma_mc, rows[0].gamma_analytic, rel));
        o.check(rel <= 0.03, "MC gamma within 3%");
        return o;
    }

    Outcome criterion5()
    {
        Outcome o;
        RandomSource rng(5, 0);
        std::size_t bad = 0;
        for (int t = 0; t < 100000; ++t)
        {
            CVector q(1 + t % 16);
            const double var = std::pow(10.0, (t % 7) - 3.0);
            for (auto &x : q)
                x = one_bit(complex_gaussian(rng, var));
            bad += energy_statistic(q) != 2.0;
        }
        o.note(fmt("%.0f of 1e5 observations with Lambda != 2", static_cast<double>(bad)));
        o.check(bad == 0, "Lambda == 2 for every one-bit observation");
        return o;
    }

    Outcome criterion6()
    {
        Outcome o;
        const std::size_t trials = 20000;
        std::vector<Rate> r;
        for (std::size_t U : {32u, 64u, 128u})
        {
            r.push_back(frame_rate(Simulator(fig1_config(U)), 5.0, trials));
            o.note(fmt("U=%.0f BER %.4g (se %.2g)", static_cast<double>(U), r.back().ber, r.back().se));
        }
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
        {
            const double gap = r[i].ber - r[i + 1].ber, se = std::hypot(r[i].se, r[i + 1].se);
            o.note(fmt("gap %.3g = %.1f se", gap, gap / se));
            o.check(gap > 3.0 * se, "separation above 3 combined standard errors");
        }
        return o;
    }

    Outcome criterion7()
    {
        Outcome o;
        const std::size_t trials = 2000;
        SimConfig diff = fig1_config(128);
        SimConfig coh = fig1_config(128);
        coh.scheme = Scheme::Coherent;
        coh.detector = Detector::Ml;
        coh.pilot_fraction = 0.125;
        SimConfig coh_half = coh;
        coh_half.pilot_fraction = 0.5;
        const Simulator sd(diff), sc(coh), sh(coh_half);
        for (double snr : {0.0, 5.0, 10.0})
        {
            const auto d = frame_rate(sd, snr, trials), c = frame_rate(sc, snr, trials), h = frame_rate(sh, snr, trials);
            o.note(fmt("%.0f dB: diff %.3g coh(.125) %.3g coh(.5) %.3g", snr, d.ber, c.ber, h.ber));
            const bool band = d.ber <= 2.0 * c.ber && c.ber <= 2.0 * d.ber;
            o.check(band, fmt("differential within 2x of coherent xi=0.125 at %.0f dB", snr));
            o.check(h.ber <= d.ber, fmt("coherent xi=0.5 <= differential at %.0f dB", snr));
        }
        return o;
    }

    Outcome criterion8()
    {
        Outcome o;
        std::vector<double> ser;
        for (std::size_t U : {16u, 64u, 256u, 512u})
        {
            SimConfig c = fig1_config(U);
            c.detector = Detector::Ml;
            c.tau_rms = 0.0;
            c.num_uses = 8;
            c.seed = 88;
            const Simulator sim(c);
            const auto op = sim.prepare(20.0);
            TrialCounts total;
            for (std::size_t t = 0; t < 10000; ++t)
                total += sim.run_trial(op, t);
            ser.push_back(static_cast<double>(total.symbol_errors) / static_cast<double>(total.symbols));
            o.note(fmt("U=%.0f SER %.4g", static_cast<double>(U), ser.back()));
        }
        for (std::size_t i = 0; i + 1 < ser.size(); ++i)
            o.check(ser[i + 1] < ser[i] || (ser[i] == 0.0 && ser[i + 1] == 0.0), "SER decreases with U");
        o.check(ser.back() < 1e-3, "SER below 1e-3 at U=512");
        return o;
    }

    Outcome criterion9()
    {
        Outcome o;
        // amplitude errors at U = 84 are near 1e-5 per bit at 10 dB, so the trend needs ~5e6 amplitude bits
        const std::size_t trend_trials = 20000, floor_trials = 2000;
        std::vector<double> amp;
        for (std::size_t U : {42u, 84u, 126u})
        {
            const auto r = frame_rate(Simulator(dapsk_config(U, Detector::Energy, 2)), 10.0, trend_trials, true);
            amp.push_back(r.ber);
            o.note(fmt("energy U=%.0f 10 dB amp %.4g (%.0f errors)", static_cast<double>(U), r.ber,
                       static_cast<double>(r.errors)));
        }
        o.check(amp[1] < amp[0] && amp[2] < amp[1], "amplitude-bit error strictly decreasing in U");

        // U = 42 keeps both detectors in a range where errors are countable
        const Simulator id(dapsk_config(42, Detector::Id, 1));
        const Simulator en(dapsk_config(42, Detector::Energy, 2));
        const double id20 = frame_rate(id, 20.0, floor_trials, true).ber;
        const double id30 = frame_rate(id, 30.0, floor_trials, true).ber;
        const double en20 = frame_rate(en, 20.0, floor_trials, true).ber;
        const double en30 = frame_rate(en, 30.0, floor_trials, true).ber;
        o.note(fmt("U=42 one-bit id %.4g -> %.4g, two-bit energy %.4g -> %.4g", id20, id30, en20, en30));
        o.check(id20 > 0.0 && id30 >= 0.5 * id20, "one-bit error floor");
        o.check(en20 > 0.0 && en30 * 5.0 <= en20, "two-bit energy improves at least 5x from a nonzero rate");
        return o;
    }

    Outcome criterion10()
    {
        Outcome o;
        SimConfig c = fig1_config(16);
        c.num_uses = 64;
        c.snr_db = {0.0, 4.0, 8.0};
        c.trials = 300;
        c.batch_size = 7;
        c.threads = 1;
        const std::string serial = format_csv(sweep(c));
        c.threads = 4;
        const std::string parallel = format_csv(sweep(c));
        const std::string again = format_csv(sweep(c));
        o.note(fmt("%.0f CSV bytes", static_cast<double>(serial.size())));
        o.check(serial == parallel && parallel == again, "byte-identical CSV");
        return o;
    }

    Outcome criterion11()
    {
        Outcome o;
        SimConfig d = fig1_config(8);
        d.adc_bits = 0;
        d.trials = 40; // 127 blocks x 2 symbols per frame
        const auto rd = Simulator(d).run_point(inf);
        SimConfig a = dapsk_config(8, Detector::Id, 0);
        a.trials = 40; // 255 symbols per frame
        const auto ra = Simulator(a).run_point(inf);
        o.note(fmt("dpsk %.0f symbols %.0f bit errors, dapsk %.0f symbols %.0f bit errors",
                   static_cast<double>(rd.counts.symbols), static_cast<double>(rd.counts.bit_errors),
                   static_cast<double>(ra.counts.symbols), static_cast<double>(ra.counts.bit_errors)));
        o.check(rd.counts.symbols >= 10000 && ra.counts.symbols >= 10000, "at least 1e4 symbols each");
        o.check(rd.counts.bit_errors == 0 && ra.counts.bit_errors == 0, "zero bit errors");
        return o;
    }

    struct Criterion
    {
        int id;
        double budget_s; // stated runtime bound, inf if none
        std::function<Outcome()> run;
    };
}

int main(int argc, char **argv)
{
    const std::vector<Criterion> all{
        {1, 1.0, criterion1},  {2, 60.0, criterion2},  {3, 5.0, criterion3},  {4, 60.0, criterion4},
        {5, inf, criterion5},  {6, 600.0, criterion6}, {7, 900.0, criterion7}, {8, inf, criterion8},
        {9, 900.0, criterion9}, {10, inf, criterion10}, {11, inf, criterion11},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto &c : all)
    {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception &e)
        {
            o.pass = false;
            o.note(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s)
            o.check(false, fmt("runtime %.1f s above %.0f s", secs, c.budget_s));
        std::printf("criterion %2d: %s  %s  (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
