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

#ifndef QDIFF_DETECT_DAPSK_HPP
#define QDIFF_DETECT_DAPSK_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qdiff/diffcode.hpp"
#include "qdiff/quantize.hpp"
#include "qdiff/types.hpp"

namespace qdiff
{
    /// Quantized samples of two consecutive uses across U antennas.
    /// rho_set is ordered like the amplitude candidates {1, a, 1/a}.
    struct DapskObservation
    {
        CVector q_prev;
        CVector q_curr;
        std::array<double, 3> rho_set{1.0, 1.0, 1.0};
    };

    /// rho(a') = 1 / ((1 + a'^2) (eta^2 sigma_z^2 + sigma_eps^2)) for a' in {1, a, 1/a}.
    std::array<double, 3> dapsk_rho_set(double eta, double noise_var_z, double noise_var_eps, double a);

    struct DapskDecision
    {
        std::size_t amp_index = 0; // into {1, a, 1/a}
        double amp_ratio = 1.0;
        std::size_t symbol = 0; // PSK point index
        bool erasure = false;   // no candidate had a finite likelihood
    };

    /// Candidate k = amp_index * M + symbol; ties resolve to the lowest k.
    /// Score = max over rho_set of sum_{u,i} log Phi(sqrt(rho) a' f~_{u,i}^T s_R). One-bit labels only.
    DapskDecision ml_one_bit_dapsk(const DapskObservation &obs, const PskConstellation &psk, double a);

    /// Same likelihood restricted to a' = 1, over the antennas in [first, first + count).
    std::size_t ml_one_bit_phase(const DapskObservation &obs, const PskConstellation &psk, std::size_t first,
                                 std::size_t count);

    /// x^_R = F_R^+ q_R, equivalently sum_u q_prev^* q_curr / sum_u |q_prev|^2.
    /// Throws DetectionError when F_R is rank deficient.
    cplx inverse_decode_estimate(const DapskObservation &obs, std::size_t first, std::size_t count);

    /// Nearest point of {1, a, 1/a} x S to the inverse-decoding estimate.
    DapskDecision inverse_decode(const DapskObservation &obs, const PskConstellation &psk, double a);

    /// Bin-probability ML: per dimension Phi(sqrt(rho)(z_{l+1} - a' f^T s_R)) - Phi(sqrt(rho)(z_l - a' f^T s_R)).
    /// With a one-bit spec the decisions equal ml_one_bit_dapsk exactly.
    DapskDecision multibit_ml(const DapskObservation &obs, const QuantizerSpec &spec, const PskConstellation &psk,
                              double a);

    /// Lambda = (1/U) sum_u |q_u|^2.
    double energy_statistic(const CVector &q);

    /// Closed-form energy model of the quantized statistic.
    struct EnergyModel
    {
        double eta = 1.0;
        double composite_noise = 0.0; // eta^2 sigma_z^2 + sigma_eps^2
        double alpha2 = 1.0;
        std::size_t num_rx = 1;
        double psi0 = 0.0, psi1 = 0.0;
    };

    struct EnergyMoments
    {
        double mean = 0.0;
        double var = 0.0;
    };

    /// mu = s~^2 + x^2 eta^2 alpha^2, var = (2 s~^2 / U)(2 s~^2 + 2 x^2 eta^2 alpha^2).
    EnergyMoments energy_moments(const EnergyModel &model, double amplitude);

    /// Root of the two-Gaussian intersection quadratic inside (mu_0, mu_1). Falls back to bisection of the
    /// log-density difference when the quadratic has no root there. Throws DomainError if psi0 == psi1 or a
    /// variance is not positive.
    double amplitude_threshold(const EnergyModel &model);
    double gaussian_intersection(const EnergyMoments &low, const EnergyMoments &high);

    /// Cut minimising the empirical misclassification of samples drawn under psi0 (low) and psi1 (high).
    /// Among several minimisers the midpoint of the minimising range is returned. If the best cut still
    /// misclassifies more than half of one class the histograms are deemed non-separating: a warning is
    /// issued and the midpoint of the sample means is returned.
    double empirical_threshold(std::span<const double> low, std::span<const double> high);

    struct AmplitudeDecision
    {
        double amplitude = 0.0;
        int b1 = 0;
    };

    /// psi0 if lambda < gamma else psi1; b1 = 0 iff the ring did not change.
    AmplitudeDecision detect_amplitude(double lambda, double gamma, double prev_amp, double psi0, double psi1);

    enum class PhaseDetector
    {
        MaximumLikelihood,
        InverseDecoding
    };

    struct VqlDecision
    {
        AmplitudeDecision amplitude;
        std::size_t symbol = 0;
    };

    /// Energy over every antenna, phase (a' = 1) from the sign group only.
    VqlDecision vql_detect(const VqlPartition &partition, const DapskObservation &obs, double gamma, double prev_amp,
                           double psi0, double psi1, const PskConstellation &psk, PhaseDetector phase);

    /// b1 from the amplitude decision (0 iff a' = 1), remaining bits from the Gray label of the symbol.
    std::vector<int> recover_bits(std::size_t amp_index, std::size_t symbol, const PskConstellation &psk);
}

#endif
