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

#include "qdiff/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "qdiff/error.hpp"

namespace qdiff
{
    namespace
    {
        class PlanCache
        {
        public:
            ~PlanCache()
            {
                for (auto &[key, plan] : plans_)
                    fftw_destroy_plan(plan);
            }

            // Plans are created under the lock (the FFTW planner is not thread-safe);
            // fftw_execute_dft on an existing plan is.
            fftw_plan get(std::size_t n, bool inverse)
            {
                std::lock_guard<std::mutex> lock(mutex_);
                const auto key = std::make_pair(n, inverse);
                if (auto it = plans_.find(key); it != plans_.end())
                    return it->second;
                std::vector<cplx> a(n), b(n);
                fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex *>(a.data()),
                                                  reinterpret_cast<fftw_complex *>(b.data()),
                                                  inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
                plans_.emplace(key, plan);
                return plan;
            }

        private:
            std::mutex mutex_;
            std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
        };

        PlanCache &cache()
        {
            static PlanCache c;
            return c;
        }
    }

    void unitary_dft(std::span<const cplx> in, std::span<cplx> out, bool inverse)
    {
        if (in.size() != out.size())
            throw ShapeError("unitary_dft: input and output lengths differ");
        const std::size_t n = in.size();
        if (n == 0)
            return;
        std::vector<cplx> src(in.begin(), in.end());
        std::vector<cplx> dst(n);
        fftw_execute_dft(cache().get(n, inverse), reinterpret_cast<fftw_complex *>(src.data()),
                         reinterpret_cast<fftw_complex *>(dst.data()));
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            out[i] = dst[i] * scale;
    }
}
