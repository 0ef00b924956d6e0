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

/* C interface to the qdiff simulator. Every function returning qdiff_status leaves a description of the
 * failure in qdiff_last_error() (per thread). Strings handed out by the library are released with
 * qdiff_string_free. */

#ifndef QDIFF_H
#define QDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDIFF_BUILDING_LIBRARY)
#define QDIFF_API __attribute__((visibility("default")))
#else
#define QDIFF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdiff_status
{
    QDIFF_OK = 0,
    QDIFF_ERR_INVALID_ARG = 1, /* null pointer, index out of range */
    QDIFF_ERR_CONFIG = 2,      /* malformed or inconsistent configuration */
    QDIFF_ERR_RUNTIME = 3,     /* simulation failure (calibration, detection, numerics) */
    QDIFF_ERR_IO = 4           /* file could not be read or written */
} qdiff_status;

typedef struct qdiff_config qdiff_config;
typedef struct qdiff_result qdiff_result;

typedef struct qdiff_metric
{
    double snr_db;
    double ber;
    double ser;
    double amp_ber; /* DAPSK ring-bit error rate, 0 otherwise */
    double spectral_efficiency;
    double wall_time;
    uint64_t trials;
    uint64_t seed;
    uint64_t bit_errors;
    uint64_t bits;
    uint64_t symbol_errors;
    uint64_t symbols;
    uint64_t amp_bit_errors;
    uint64_t amp_bits;
    uint64_t erasures;
} qdiff_metric;

typedef void (*qdiff_warning_fn)(const char *message, void *user);

QDIFF_API const char *qdiff_version(void);
QDIFF_API const char *qdiff_last_error(void);
QDIFF_API void qdiff_string_free(char *s);

/* NULL restores the default (stderr). */
QDIFF_API void qdiff_set_warning_callback(qdiff_warning_fn fn, void *user);

QDIFF_API qdiff_status qdiff_config_new(qdiff_config **out);
QDIFF_API qdiff_status qdiff_config_from_file(const char *path, qdiff_config **out);
QDIFF_API qdiff_status qdiff_config_from_string(const char *text, qdiff_config **out);
/* Same keys and value syntax as the configuration file. Not validated until used or validated. */
QDIFF_API qdiff_status qdiff_config_set(qdiff_config *cfg, const char *key, const char *value);
QDIFF_API qdiff_status qdiff_config_validate(const qdiff_config *cfg);
QDIFF_API qdiff_status qdiff_config_to_string(const qdiff_config *cfg, char **out);
QDIFF_API void qdiff_config_free(qdiff_config *cfg);

/* Derived quantities: channel taps, Bussgang parameters, rho per SNR point. */
QDIFF_API qdiff_status qdiff_info(const qdiff_config *cfg, char **out);

/* One record per SNR point, ascending. */
QDIFF_API qdiff_status qdiff_sweep(const qdiff_config *cfg, qdiff_result **out);
QDIFF_API size_t qdiff_result_count(const qdiff_result *res);
QDIFF_API qdiff_status qdiff_result_get(const qdiff_result *res, size_t index, qdiff_metric *out);
QDIFF_API qdiff_status qdiff_result_to_csv(const qdiff_result *res, char **out);
QDIFF_API qdiff_status qdiff_result_write_csv(const qdiff_result *res, const char *path);
QDIFF_API void qdiff_result_free(qdiff_result *res);

/* CSV table num_rx,snr_db,gamma_mc,gamma_analytic for a DAPSK configuration. */
QDIFF_API qdiff_status qdiff_calibrate_thresholds(const qdiff_config *cfg, const size_t *num_rx, size_t num_rx_count,
                                                  const double *snr_db, size_t snr_count, char **out);

#ifdef __cplusplus
}
#endif

#endif
