/* spotsim -- exact simulation of mean-reverting jump-diffusion spot prices and
 * Monte-Carlo valuation of Asian options, gas storages and swing options.
 *
 * C interface of the shared library. All entry points return a status code
 * (SPS_OK on success); sps_last_error() describes the most recent failure on
 * the calling thread. Strings returned through char** are heap-allocated and
 * must be released with sps_string_free().
 */
#ifndef SPOTSIM_H
#define SPOTSIM_H

#include <stdint.h>

#if defined(_WIN32)
#ifdef SPOTSIM_EXPORTS
#define SPOTSIM_API __declspec(dllexport)
#else
#define SPOTSIM_API __declspec(dllimport)
#endif
#else
#define SPOTSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum sps_status {
    SPS_OK = 0,
    SPS_ERR_CONFIG = 2,     /* malformed or inconsistent configuration */
    SPS_ERR_DOMAIN = 3,     /* numerical precondition violated */
    SPS_ERR_VALIDATION = 4, /* oracle suite reported failures */
    SPS_ERR_IO = 5,         /* file could not be read or written */
    SPS_ERR_INTERNAL = 6
};

/* Opaque run configuration: market model, contract, simulation settings. */
typedef struct sps_config sps_config;

typedef struct sps_valuation {
    double price;
    double rmse; /* sample std of path payoffs / sqrt(n) */
    double path_seconds;
    double opt_seconds;
    double total_seconds;
    int64_t n_paths;
    char contract[24];
    char sampler[24];
} sps_valuation;

SPOTSIM_API const char* sps_version(void);
SPOTSIM_API const char* sps_status_name(int status);

/* Thread-local message for the last failing call on this thread. */
SPOTSIM_API const char* sps_last_error(void);
SPOTSIM_API void sps_string_free(char* s);

SPOTSIM_API int sps_config_load(const char* path, sps_config** out);
SPOTSIM_API int sps_config_parse(const char* json_text, sps_config** out);
/* Canonical JSON; parse(serialize(cfg)) reproduces the configuration. */
SPOTSIM_API char* sps_config_serialize(const sps_config* cfg);
/* Recognized keys: seed, n_paths, sampler, workers, allow_biased, out_dir,
 * bench_force, contract. */
SPOTSIM_API int sps_config_override(sps_config* cfg, const char* key, const char* value);
/* Recognized keys: contract, sampler, out_dir. */
SPOTSIM_API char* sps_config_get(const sps_config* cfg, const char* key);
SPOTSIM_API void sps_config_free(sps_config* cfg);

/* Writes paths.csv (plus factor_*.csv when retain_factors is set) into out_dir
 * and returns a short summary. out_dir NULL simulates without writing. */
SPOTSIM_API int sps_simulate(const sps_config* cfg, const char* out_dir,
                             char** summary_out);

/* Prices the configured contract; writes report.csv into out_dir when given. */
SPOTSIM_API int sps_price(const sps_config* cfg, const char* out_dir,
                          sps_valuation* out, char** summary_out);

/* Sampler timing ladder; writes bench.csv into out_dir when given. */
SPOTSIM_API int sps_bench(const sps_config* cfg, const char* out_dir,
                          char** summary_out);

/* Statistical oracle suite; returns SPS_ERR_VALIDATION when a check fails.
 * The table of per-check results is always written to report_out. */
SPOTSIM_API int sps_validate(const sps_config* cfg, char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* SPOTSIM_H */
