// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "spotsim.h"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string sampler;
    std::string seed;
    std::string n_paths;
    std::string workers;
    bool allow_biased = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--sampler", opts.sampler,
                    "Sampler kind: jumptime|polya|randomrate|euler");
    cmd->add_option("--seed", opts.seed, "Master seed");
    cmd->add_option("--n-paths", opts.n_paths, "Number of Monte-Carlo paths");
    cmd->add_option("--workers", opts.workers, "Worker threads (0 = hardware)")
        ->envname("SPOTSIM_WORKERS");
    cmd->add_flag("--allow-biased", opts.allow_biased,
                  "Permit the biased Euler sampler (demonstrations only)");
}

int fail(int status) {
    std::fprintf(stderr, "error (%s): %s\n", sps_status_name(status), sps_last_error());
    return status;
}

/// Loads the config and applies the shared overrides; returns nullptr after
/// printing the error.
sps_config* load_config(const CommonOpts& opts, int& status) {
    sps_config* cfg = nullptr;
    status = sps_config_load(opts.config_path.c_str(), &cfg);
    if (status != SPS_OK) return nullptr;
    const auto apply = [&](const char* key, const std::string& value) {
        if (status == SPS_OK && !value.empty()) {
            status = sps_config_override(cfg, key, value.c_str());
        }
    };
    if (opts.allow_biased && status == SPS_OK) {
        status = sps_config_override(cfg, "allow_biased", "true");
    }
    apply("sampler", opts.sampler);
    apply("seed", opts.seed);
    apply("n_paths", opts.n_paths);
    apply("workers", opts.workers);
    apply("out_dir", opts.out_dir);
    if (status != SPS_OK) {
        sps_config_free(cfg);
        return nullptr;
    }
    return cfg;
}

std::string effective_out_dir(const sps_config* cfg) {
    char* dir = sps_config_get(cfg, "out_dir");
    std::string out = dir ? dir : "out";
    sps_string_free(dir);
    return out;
}

int run_simulate(const CommonOpts& opts) {
    int status = SPS_OK;
    sps_config* cfg = load_config(opts, status);
    if (!cfg) return fail(status);
    char* summary = nullptr;
    status = sps_simulate(cfg, effective_out_dir(cfg).c_str(), &summary);
    if (status == SPS_OK && summary) std::printf("%s\n", summary);
    sps_string_free(summary);
    sps_config_free(cfg);
    return status == SPS_OK ? 0 : fail(status);
}

int run_price(const CommonOpts& opts, const char* expected_contract) {
    int status = SPS_OK;
    sps_config* cfg = load_config(opts, status);
    if (!cfg) return fail(status);
    char* contract = sps_config_get(cfg, "contract");
    if (!contract || std::string(contract) != expected_contract) {
        std::fprintf(stderr,
                     "error (config-error): config declares contract '%s' but the "
                     "subcommand prices '%s'\n",
                     contract ? contract : "none", expected_contract);
        sps_string_free(contract);
        sps_config_free(cfg);
        return SPS_ERR_CONFIG;
    }
    sps_string_free(contract);
    sps_valuation valuation{};
    char* summary = nullptr;
    status = sps_price(cfg, effective_out_dir(cfg).c_str(), &valuation, &summary);
    if (status == SPS_OK && summary) std::printf("%s\n", summary);
    sps_string_free(summary);
    sps_config_free(cfg);
    return status == SPS_OK ? 0 : fail(status);
}

int run_bench(const CommonOpts& opts, bool force) {
    int status = SPS_OK;
    sps_config* cfg = load_config(opts, status);
    if (!cfg) return fail(status);
    if (force) {
        status = sps_config_override(cfg, "bench_force", "true");
        if (status != SPS_OK) {
            sps_config_free(cfg);
            return fail(status);
        }
    }
    char* summary = nullptr;
    status = sps_bench(cfg, effective_out_dir(cfg).c_str(), &summary);
    if (status == SPS_OK && summary) std::printf("%s\n", summary);
    sps_string_free(summary);
    sps_config_free(cfg);
    return status == SPS_OK ? 0 : fail(status);
}

int run_validate(const CommonOpts& opts) {
    int status = SPS_OK;
    sps_config* cfg = load_config(opts, status);
    if (!cfg) return fail(status);
    char* report = nullptr;
    status = sps_validate(cfg, &report);
    if (report) std::printf("%s", report);
    sps_string_free(report);
    sps_config_free(cfg);
    return status == SPS_OK ? 0 : status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "spotsim: exact mean-reverting jump-diffusion simulation and energy-derivative "
        "pricing"};
    app.require_subcommand(1);

    CommonOpts sim_opts, asian_opts, storage_opts, swing_opts, bench_opts, validate_opts;
    bool bench_force = false;

    add_common(app.add_subcommand("simulate", "Simulate spot paths and write CSV"),
               sim_opts);
    add_common(app.add_subcommand("price-asian", "Price the configured Asian option"),
               asian_opts);
    add_common(app.add_subcommand("price-storage", "Value the configured gas storage"),
               storage_opts);
    add_common(app.add_subcommand("price-swing", "Value the configured swing option"),
               swing_opts);
    auto* bench_cmd =
        app.add_subcommand("bench", "Time the samplers over the configured ladder");
    add_common(bench_cmd, bench_opts);
    bench_cmd->add_flag("--force", bench_force, "Run even on an unoptimized build");
    add_common(app.add_subcommand("validate", "Run the statistical oracle suite"),
               validate_opts);

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("simulate")) return run_simulate(sim_opts);
    if (app.got_subcommand("price-asian")) return run_price(asian_opts, "asian");
    if (app.got_subcommand("price-storage")) return run_price(storage_opts, "storage");
    if (app.got_subcommand("price-swing")) return run_price(swing_opts, "swing");
    if (app.got_subcommand("bench")) return run_bench(bench_opts, bench_force);
    if (app.got_subcommand("validate")) return run_validate(validate_opts);
    return 0;
}
