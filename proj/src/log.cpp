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

#include "qdiff/log.hpp"

#include <iostream>
#include <mutex>

namespace qdiff
{
    namespace
    {
        std::mutex sink_mutex;
        WarningSink &sink()
        {
            static WarningSink s = [](const std::string &m) { std::cerr << "qdiff: warning: " << m << '\n'; };
            return s;
        }
    }

    void set_warning_sink(WarningSink s)
    {
        std::lock_guard<std::mutex> lock(sink_mutex);
        sink() = std::move(s);
    }

    void warn(const std::string &message)
    {
        std::lock_guard<std::mutex> lock(sink_mutex);
        if (sink())
            sink()(message);
    }
}
