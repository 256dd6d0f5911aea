#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "market.hpp"
#include "pricing.hpp"

namespace spotsim::app {

enum class ContractType { None, Asian, Storage, Swing };

std::string_view to_string(ContractType type);

struct BenchSettings {
    std::vector<std::size_t> ladder{10000, 30000, 100000};
    int reps = 3;
    int warmup = 1;
    bool include_lsmc = false;
    std::size_t lsmc_n_paths = 20000;
    bool force = false;  // allow running on an unoptimized build
};

/// One run configuration: market model, optional contract, simulation settings
/// and output destinations. JSON keys mirror the model parameter tables.
struct RunConfig {
    market::MarketModel model;

    ContractType contract = ContractType::None;
    pricing::AsianSpec asian;
    pricing::StorageSpec storage;
    pricing::SwingSpec swing;

    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    int steps_per_year = 365;
    double horizon_years = 1.0;
    int workers = 0;  // 0 = hardware concurrency
    bool retain_factors = false;

    pricing::LsmcConfig lsmc;
    BenchSettings bench;

    std::string out_dir = "out";

    static RunConfig from_json_text(const std::string& text);
    static RunConfig load_file(const std::string& path);
    std::string to_json_text() const;

    /// Applies a CLI-style override; recognized keys: seed, n_paths, sampler,
    /// workers, allow_biased, out_dir, bench_force, contract.
    void apply_override(const std::string& key, const std::string& value);

    market::SimOptions sim_options() const {
        return {n_paths, seed, workers, retain_factors};
    }
};

}  // namespace spotsim::app
