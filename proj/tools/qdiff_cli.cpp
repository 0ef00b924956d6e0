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

// qdiff command-line driver. Links against the C interface only.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "qdiff/qdiff.h"

namespace
{
    constexpr int exit_config = 2;
    constexpr int exit_runtime = 3;

    struct Options
    {
        std::string config_path;
        std::string out;
        std::string snr_db;
        std::string detector;
        std::vector<std::string> settings; // key=value
        long long trials = -1;
        long long seed = -1;
        long long threads = -1;
        std::string num_rx = "42,84,126,256,512";
        bool quiet = false;
    };

    int status_exit(qdiff_status s)
    {
        std::fprintf(stderr, "qdiff: %s\n", qdiff_last_error());
        return s == QDIFF_ERR_CONFIG || s == QDIFF_ERR_INVALID_ARG ? exit_config : exit_runtime;
    }

    class Config
    {
    public:
        ~Config() { qdiff_config_free(cfg_); }
        qdiff_config *get() const { return cfg_; }
        qdiff_config **out() { return &cfg_; }

    private:
        qdiff_config *cfg_ = nullptr;
    };

    qdiff_status build_config(const Options &o, Config &cfg)
    {
        qdiff_status s = o.config_path.empty() ? qdiff_config_new(cfg.out())
                                               : qdiff_config_from_file(o.config_path.c_str(), cfg.out());
        if (s != QDIFF_OK)
            return s;
        auto set = [&](const std::string &k, const std::string &v) {
            return s == QDIFF_OK ? (s = qdiff_config_set(cfg.get(), k.c_str(), v.c_str())) : s;
        };
        for (const auto &kv : o.settings)
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
            {
                std::fprintf(stderr, "qdiff: --set expects key=value, got '%s'\n", kv.c_str());
                return QDIFF_ERR_CONFIG;
            }
            set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!o.snr_db.empty())
            set("snr_db", o.snr_db);
        if (!o.detector.empty())
            set("detector", o.detector);
        if (o.trials >= 0)
            set("trials", std::to_string(o.trials));
        if (o.seed >= 0)
            set("seed", std::to_string(o.seed));
        if (o.threads >= 0)
            set("threads", std::to_string(o.threads));
        return s == QDIFF_OK ? qdiff_config_validate(cfg.get()) : s;
    }

    int emit(const std::string &text, const std::string &path)
    {
        if (path.empty() || path == "-")
        {
            std::fputs(text.c_str(), stdout);
            return 0;
        }
        FILE *f = std::fopen(path.c_str(), "wb");
        if (!f || std::fputs(text.c_str(), f) < 0 || std::fclose(f) != 0)
        {
            std::fprintf(stderr, "qdiff: cannot write '%s'\n", path.c_str());
            return exit_runtime;
        }
        return 0;
    }

    int run_sweep(const Options &o)
    {
        Config cfg;
        if (qdiff_status s = build_config(o, cfg); s != QDIFF_OK)
            return status_exit(s);
        qdiff_result *res = nullptr;
        if (qdiff_status s = qdiff_sweep(cfg.get(), &res); s != QDIFF_OK)
            return status_exit(s);
        if (!o.quiet)
            for (size_t i = 0; i < qdiff_result_count(res); ++i)
            {
                qdiff_metric m{};
                qdiff_result_get(res, i, &m);
                std::fprintf(stderr, "snr %7.2f dB  ber %.4e  ser %.4e  se %.2f  trials %llu  %.1f s\n", m.snr_db,
                             m.ber, m.ser, m.spectral_efficiency, static_cast<unsigned long long>(m.trials),
                             m.wall_time);
            }
        qdiff_status s = QDIFF_OK;
        if (o.out.empty() || o.out == "-")
        {
            char *csv = nullptr;
            s = qdiff_result_to_csv(res, &csv);
            if (s == QDIFF_OK)
                std::fputs(csv, stdout);
            qdiff_string_free(csv);
        }
        else
            s = qdiff_result_write_csv(res, o.out.c_str());
        qdiff_result_free(res);
        return s == QDIFF_OK ? 0 : status_exit(s);
    }

    int run_info(const Options &o)
    {
        Config cfg;
        if (qdiff_status s = build_config(o, cfg); s != QDIFF_OK)
            return status_exit(s);
        char *text = nullptr;
        if (qdiff_status s = qdiff_info(cfg.get(), &text); s != QDIFF_OK)
            return status_exit(s);
        const int rc = emit(text, o.out);
        qdiff_string_free(text);
        return rc;
    }

    template <class T>
    bool parse_list(const std::string &text, std::vector<T> &out)
    {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            char *end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (end == item.c_str() || *end != '\0')
                return false;
            if constexpr (std::is_unsigned_v<T>)
                if (!(v >= 1.0 && v == std::floor(v) && v < 1e9))
                    return false;
            out.push_back(static_cast<T>(v));
        }
        return !out.empty();
    }

    int run_calibrate(Options o)
    {
        std::vector<size_t> us;
        if (!parse_list(o.num_rx, us))
        {
            std::fprintf(stderr, "qdiff: bad --num-rx list '%s'\n", o.num_rx.c_str());
            return exit_config;
        }
        Config cfg;
        if (qdiff_status s = build_config(o, cfg); s != QDIFF_OK)
            return status_exit(s);
        // the SNR grid goes through the config parser so ranges and "inf" work as everywhere else
        char *text = nullptr;
        if (qdiff_status s = qdiff_config_to_string(cfg.get(), &text); s != QDIFF_OK)
            return status_exit(s);
        std::vector<double> snrs;
        std::istringstream lines(text);
        qdiff_string_free(text);
        for (std::string line; std::getline(lines, line);)
            if (line.rfind("snr_db = ", 0) == 0)
                parse_list(line.substr(9), snrs);
        char *csv = nullptr;
        if (qdiff_status s = qdiff_calibrate_thresholds(cfg.get(), us.data(), us.size(), snrs.data(), snrs.size(), &csv);
            s != QDIFF_OK)
            return status_exit(s);
        const int rc = emit(csv, o.out);
        qdiff_string_free(csv);
        return rc;
    }

    void common_flags(CLI::App *app, Options &o, bool config_required)
    {
        auto *c = app->add_option("config", o.config_path, "configuration file");
        if (config_required)
            c->required()->check(CLI::ExistingFile);
        app->add_option("--snr-db", o.snr_db, "SNR grid in dB: list \"0,5,10\" or range \"0:5:30\"");
        app->add_option("--trials", o.trials, "frames per SNR point")->check(CLI::PositiveNumber);
        app->add_option("--seed", o.seed, "master seed")->check(CLI::NonNegativeNumber);
        app->add_option("--detector", o.detector, "ml|decoupled|id|multibit|energy|vql|coherent")
            ->check(CLI::IsMember({"ml", "decoupled", "id", "multibit", "energy", "vql", "coherent"}));
        app->add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        app->add_option("--set", o.settings, "override any configuration key (key=value)");
        app->add_option("--out", o.out, "output path, '-' for stdout");
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"qdiff: differential massive-MIMO link simulator with low-resolution ADCs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qdiff_version()));

    Options o;
    auto *simulate = app.add_subcommand("simulate", "run the SNR grid of a configuration file and write CSV");
    common_flags(simulate, o, true);
    simulate->add_flag("-q,--quiet", o.quiet, "no progress lines on stderr");

    auto *sweep = app.add_subcommand("sweep", "like simulate, configuration file optional, grid from flags");
    common_flags(sweep, o, false);
    sweep->add_flag("-q,--quiet", o.quiet, "no progress lines on stderr");

    auto *calibrate = app.add_subcommand("calibrate-threshold", "energy threshold table versus U and SNR");
    common_flags(calibrate, o, false);
    calibrate->add_option("--num-rx", o.num_rx, "comma-separated antenna counts");

    auto *info = app.add_subcommand("info", "print derived quantities (taps, Bussgang parameters, rho)");
    common_flags(info, o, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    if (*simulate || *sweep)
        return run_sweep(o);
    if (*calibrate)
    {
        // without a file: the 16-DAPSK 2-bit energy setup; --set entries still apply on top
        if (o.config_path.empty())
            o.settings.insert(o.settings.begin(), {"scheme=dapsk", "num_tx=1", "num_symbols=1", "block_len=1",
                                                   "psk_order=16", "adc_bits=2", "detector=energy"});
        return run_calibrate(o);
    }
    return run_info(o);
}
