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

#ifndef QDIFF_FFT_HPP
#define QDIFF_FFT_HPP

#include <span>

#include "qdiff/types.hpp"

namespace qdiff
{
    // Unitary DFT (1/sqrt(N) scaling in both directions), backed by FFTW.
    //   forward: X[v] = N^{-1/2} sum_n x[n] e^{-j 2 pi n v / N}
    //   inverse: x[n] = N^{-1/2} sum_v X[v] e^{+j 2 pi n v / N}
    // in and out may alias. Safe to call from several threads.
    void unitary_dft(std::span<const cplx> in, std::span<cplx> out, bool inverse);
}

#endif
