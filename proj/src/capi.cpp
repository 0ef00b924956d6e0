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

#include "qdiff/qdiff.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "qdiff/config.hpp"
#include "qdiff/error.hpp"
#include "qdiff/log.hpp"
#include "qdiff/simulate.hpp"

struct qdiff_config
{
    qdiff::SimConfig cfg;
};

struct qdiff_result
{
    std::vector<qdiff::MetricRecord> records;
};

namespace
{
    thread_local std::string last_error;

    qdiff_status fail(qdiff_status s, const std::string &msg)
    {
        last_error = msg;
        return s;
    }

    template <class F>
    qdiff_status guarded(F &&f)
    {
        try
        {
            f();
            last_error.clear();
            return QDIFF_OK;
        }
        catch (const qdiff::Error &e)
        {
            switch (e.kind())
            {
            case qdiff::ErrorKind::Config: return fail(QDIFF_ERR_CONFIG, e.what());
            case qdiff::ErrorKind::Io: return fail(QDIFF_ERR_IO, e.what());
            default: return fail(QDIFF_ERR_RUNTIME, e.what());
            }
        }
        catch (const std::bad_alloc &)
        {
            return fail(QDIFF_ERR_RUNTIME, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail(QDIFF_ERR_RUNTIME, e.what());
        }
        catch (...)
        {
            return fail(QDIFF_ERR_RUNTIME, "unknown error");
        }
    }

    char *dup_string(const std::string &s)
    {
        auto *p = static_cast<char *>(std::malloc(s.size() + 1));
        if (!p)
            throw std::bad_alloc();
        std::memcpy(p, s.c_str(), s.size() + 1);
        return p;
    }
}

extern "C" {

const char *qdiff_version(void) { return "0.1.0"; }

const char *qdiff_last_error(void) { return last_error.c_str(); }

void qdiff_string_free(char *s) { std::free(s); }

void qdiff_set_warning_callback(qdiff_warning_fn fn, void *user)
{
    if (!fn)
        qdiff::set_warning_sink([](const std::string &m) { std::cerr << "qdiff: warning: " << m << '\n'; });
    else
        qdiff::set_warning_sink([fn, user](const std::string &m) { fn(m.c_str(), user); });
}

qdiff_status qdiff_config_new(qdiff_config **out)
{
    if (!out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_new: null output");
    return guarded([&] { *out = new qdiff_config{}; });
}

qdiff_status qdiff_config_from_file(const char *path, qdiff_config **out)
{
    if (!path || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_from_file: null argument");
    return guarded([&] { *out = new qdiff_config{qdiff::load_config(path)}; });
}

qdiff_status qdiff_config_from_string(const char *text, qdiff_config **out)
{
    if (!text || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_from_string: null argument");
    return guarded([&] { *out = new qdiff_config{qdiff::parse_config(text)}; });
}

qdiff_status qdiff_config_set(qdiff_config *cfg, const char *key, const char *value)
{
    if (!cfg || !key || !value)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_set: null argument");
    return guarded([&] { qdiff::set_option(cfg->cfg, key, value); });
}

qdiff_status qdiff_config_validate(const qdiff_config *cfg)
{
    if (!cfg)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_validate: null config");
    return guarded([&] { cfg->cfg.validate(); });
}

qdiff_status qdiff_config_to_string(const qdiff_config *cfg, char **out)
{
    if (!cfg || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_config_to_string: null argument");
    return guarded([&] { *out = dup_string(qdiff::format_config(cfg->cfg)); });
}

void qdiff_config_free(qdiff_config *cfg) { delete cfg; }

qdiff_status qdiff_info(const qdiff_config *cfg, char **out)
{
    if (!cfg || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_info: null argument");
    return guarded([&] { *out = dup_string(qdiff::Simulator(cfg->cfg).describe()); });
}

qdiff_status qdiff_sweep(const qdiff_config *cfg, qdiff_result **out)
{
    if (!cfg || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_sweep: null argument");
    return guarded([&] { *out = new qdiff_result{qdiff::sweep(cfg->cfg)}; });
}

size_t qdiff_result_count(const qdiff_result *res) { return res ? res->records.size() : 0; }

qdiff_status qdiff_result_get(const qdiff_result *res, size_t index, qdiff_metric *out)
{
    if (!res || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_result_get: null argument");
    if (index >= res->records.size())
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_result_get: index " + std::to_string(index) + " out of range");
    const qdiff::MetricRecord &r = res->records[index];
    *out = qdiff_metric{r.snr_db,
                        r.ber,
                        r.ser,
                        r.amp_ber,
                        r.spectral_efficiency,
                        r.wall_time,
                        r.trials,
                        r.seed,
                        r.counts.bit_errors,
                        r.counts.bits,
                        r.counts.symbol_errors,
                        r.counts.symbols,
                        r.counts.amp_bit_errors,
                        r.counts.amp_bits,
                        r.counts.erasures};
    last_error.clear();
    return QDIFF_OK;
}

qdiff_status qdiff_result_to_csv(const qdiff_result *res, char **out)
{
    if (!res || !out)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_result_to_csv: null argument");
    return guarded([&] { *out = dup_string(qdiff::format_csv(res->records)); });
}

qdiff_status qdiff_result_write_csv(const qdiff_result *res, const char *path)
{
    if (!res || !path)
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_result_write_csv: null argument");
    return guarded([&] { qdiff::write_csv(res->records, path); });
}

void qdiff_result_free(qdiff_result *res) { delete res; }

qdiff_status qdiff_calibrate_thresholds(const qdiff_config *cfg, const size_t *num_rx, size_t num_rx_count,
                                        const double *snr_db, size_t snr_count, char **out)
{
    if (!cfg || !out || (num_rx_count && !num_rx) || (snr_count && !snr_db))
        return fail(QDIFF_ERR_INVALID_ARG, "qdiff_calibrate_thresholds: null argument");
    return guarded([&] {
        const std::vector<std::size_t> us(num_rx, num_rx + num_rx_count);
        const std::vector<double> snrs(snr_db, snr_db + snr_count);
        *out = dup_string(qdiff::format_threshold_csv(qdiff::threshold_table(cfg->cfg, us, snrs)));
    });
}

}
