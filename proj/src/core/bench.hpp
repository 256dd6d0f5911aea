#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace spotsim::app {

struct BenchPathRow {
    std::string sampler;
    std::size_t n_paths = 0;
    double median_seconds = 0.0;
    double ratio_vs_polya = 0.0;  // this sampler's time / polya time at the same n
};

struct BenchLsmcRow {
    std::string sampler;
    std::size_t n_paths = 0;
    double median_path_seconds = 0.0;
    double median_total_seconds = 0.0;
    double path_ratio_vs_polya = 0.0;
    double total_ratio_vs_polya = 0.0;
};

struct BenchReport {
    std::vector<BenchPathRow> path_rows;
    std::vector<BenchLsmcRow> lsmc_rows;
    int hardware_threads = 0;
    int workers = 0;
    std::string build_profile;

    std::string to_csv() const;
    std::string summary() const;
};

/// Times pure path generation per sampler over the configured ladder (median of
/// reps after a discarded warmup), plus optional full LSMC runs for the
/// path-vs-optimization split. Refuses to run on an unoptimized build unless
/// forced.
BenchReport run_bench(const RunConfig& cfg);

}  // namespace spotsim::app
