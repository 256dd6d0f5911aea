#include "spotsim.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "../core/bench.hpp"
#include "../core/config.hpp"
#include "../core/csv.hpp"
#include "../core/errors.hpp"
#include "../core/validate.hpp"

using spotsim::app::RunConfig;

struct sps_config {
    RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void copy_label(char* dst, std::size_t cap, const std::string& src) {
    std::snprintf(dst, cap, "%s", src.c_str());
}

/// Runs `fn`, translating exceptions into status codes and the thread-local
/// error message.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const spotsim::ConfigError& e) {
        set_error(e.what());
        return SPS_ERR_CONFIG;
    } catch (const spotsim::IoError& e) {
        set_error(e.what());
        return SPS_ERR_IO;
    } catch (const spotsim::DomainError& e) {
        set_error(e.what());
        return SPS_ERR_DOMAIN;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SPS_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return SPS_ERR_INTERNAL;
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw spotsim::IoError("cannot create output directory: " + dir);
}

}  // namespace

extern "C" {

const char* sps_version(void) { return "0.1.0"; }

const char* sps_status_name(int status) {
    switch (status) {
        case SPS_OK: return "ok";
        case SPS_ERR_CONFIG: return "config-error";
        case SPS_ERR_DOMAIN: return "domain-error";
        case SPS_ERR_VALIDATION: return "validation-failure";
        case SPS_ERR_IO: return "io-error";
        case SPS_ERR_INTERNAL: return "internal-error";
        default: return "unknown-status";
    }
}

const char* sps_last_error(void) { return g_last_error.c_str(); }

void sps_string_free(char* s) { delete[] s; }

int sps_config_load(const char* path, sps_config** out) {
    return guarded([&]() -> int {
        if (!path || !out) {
            set_error("sps_config_load: null argument");
            return SPS_ERR_CONFIG;
        }
        auto holder = std::make_unique<sps_config>();
        holder->cfg = RunConfig::load_file(path);
        *out = holder.release();
        return SPS_OK;
    });
}

int sps_config_parse(const char* json_text, sps_config** out) {
    return guarded([&]() -> int {
        if (!json_text || !out) {
            set_error("sps_config_parse: null argument");
            return SPS_ERR_CONFIG;
        }
        auto holder = std::make_unique<sps_config>();
        holder->cfg = RunConfig::from_json_text(json_text);
        *out = holder.release();
        return SPS_OK;
    });
}

char* sps_config_serialize(const sps_config* cfg) {
    if (!cfg) {
        set_error("sps_config_serialize: null config");
        return nullptr;
    }
    try {
        return dup_string(cfg->cfg.to_json_text());
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

int sps_config_override(sps_config* cfg, const char* key, const char* value) {
    return guarded([&]() -> int {
        if (!cfg || !key || !value) {
            set_error("sps_config_override: null argument");
            return SPS_ERR_CONFIG;
        }
        cfg->cfg.apply_override(key, value);
        return SPS_OK;
    });
}

char* sps_config_get(const sps_config* cfg, const char* key) {
    if (!cfg || !key) {
        set_error("sps_config_get: null argument");
        return nullptr;
    }
    const std::string k = key;
    if (k == "contract") return dup_string(std::string(to_string(cfg->cfg.contract)));
    if (k == "out_dir") return dup_string(cfg->cfg.out_dir);
    if (k == "sampler") {
        return dup_string(std::string(spotsim::ou::to_string(cfg->cfg.model.sampler)));
    }
    set_error("sps_config_get: unknown key '" + k + "'");
    return nullptr;
}

void sps_config_free(sps_config* cfg) { delete cfg; }

int sps_simulate(const sps_config* cfg, const char* out_dir, char** summary_out) {
    return guarded([&]() -> int {
        if (!cfg) {
            set_error("sps_simulate: null config");
            return SPS_ERR_CONFIG;
        }
        const RunConfig& rc = cfg->cfg;
        const auto grid =
            spotsim::market::TimeGrid::daily(rc.horizon_years, rc.steps_per_year);
        const auto batch =
            spotsim::market::simulate_paths(rc.model, grid, rc.sim_options());
        std::string summary = "simulate: n_paths=" + std::to_string(batch.n_paths) +
                              " steps=" + std::to_string(grid.steps()) +
                              " sampler=" + std::string(to_string(rc.model.sampler)) +
                              " seed=" + std::to_string(rc.seed);
        if (out_dir) {
            ensure_dir(out_dir);
            const std::string base = std::string(out_dir) + "/";
            spotsim::csvio::write_matrix_csv(base + "paths.csv", grid, batch.n_paths,
                                             batch.spot);
            summary += "\n  wrote " + base + "paths.csv";
            if (rc.retain_factors) {
                spotsim::csvio::write_matrix_csv(base + "factor_x.csv", grid, batch.n_paths,
                                                 batch.factor_x);
                spotsim::csvio::write_matrix_csv(base + "factor_y1.csv", grid,
                                                 batch.n_paths, batch.factor_y1);
                spotsim::csvio::write_matrix_csv(base + "factor_y2.csv", grid,
                                                 batch.n_paths, batch.factor_y2);
                summary += " plus factor_{x,y1,y2}.csv";
            }
        }
        if (summary_out) *summary_out = dup_string(summary);
        return SPS_OK;
    });
}

int sps_price(const sps_config* cfg, const char* out_dir, sps_valuation* out,
              char** summary_out) {
    return guarded([&]() -> int {
        if (!cfg || !out) {
            set_error("sps_price: null argument");
            return SPS_ERR_CONFIG;
        }
        const RunConfig& rc = cfg->cfg;
        spotsim::pricing::ValuationReport report;
        using spotsim::app::ContractType;
        switch (rc.contract) {
            case ContractType::Asian:
                report = spotsim::pricing::price_asian(rc.model, rc.asian, rc.sim_options(),
                                                       rc.steps_per_year);
                break;
            case ContractType::Storage:
                report = spotsim::pricing::price_storage(rc.model, rc.storage, rc.lsmc,
                                                         rc.sim_options(), rc.steps_per_year);
                break;
            case ContractType::Swing:
                report = spotsim::pricing::price_swing(rc.model, rc.swing, rc.lsmc,
                                                       rc.sim_options(), rc.steps_per_year);
                break;
            case ContractType::None:
                set_error("sps_price: the configuration has no contract section");
                return SPS_ERR_CONFIG;
        }
        *out = sps_valuation{};
        out->price = report.price;
        out->rmse = report.rmse;
        out->path_seconds = report.path_seconds;
        out->opt_seconds = report.opt_seconds;
        out->total_seconds = report.total_seconds;
        out->n_paths = static_cast<int64_t>(report.n_paths);
        copy_label(out->contract, sizeof(out->contract), report.contract);
        copy_label(out->sampler, sizeof(out->sampler), report.sampler);
        if (out_dir) {
            ensure_dir(out_dir);
            spotsim::csvio::write_report_csv(std::string(out_dir) + "/report.csv", report);
        }
        if (summary_out) *summary_out = dup_string(report.summary_line());
        return SPS_OK;
    });
}

int sps_bench(const sps_config* cfg, const char* out_dir, char** summary_out) {
    return guarded([&]() -> int {
        if (!cfg) {
            set_error("sps_bench: null config");
            return SPS_ERR_CONFIG;
        }
        const auto report = spotsim::app::run_bench(cfg->cfg);
        if (out_dir) {
            ensure_dir(out_dir);
            std::ofstream out(std::string(out_dir) + "/bench.csv");
            if (!out) throw spotsim::IoError("cannot write bench.csv");
            out << report.to_csv();
        }
        if (summary_out) *summary_out = dup_string(report.summary());
        return SPS_OK;
    });
}

int sps_validate(const sps_config* cfg, char** report_out) {
    return guarded([&]() -> int {
        if (!cfg) {
            set_error("sps_validate: null config");
            return SPS_ERR_CONFIG;
        }
        const auto report = spotsim::app::run_validation(cfg->cfg);
        if (report_out) *report_out = dup_string(report.table());
        if (!report.all_passed()) {
            set_error("validation: at least one check failed");
            return SPS_ERR_VALIDATION;
        }
        return SPS_OK;
    });
}

}  // extern "C"
