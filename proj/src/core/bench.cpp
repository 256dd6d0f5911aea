#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "errors.hpp"

namespace spotsim::app {

namespace {

using Clock = std::chrono::steady_clock;

#ifdef NDEBUG
constexpr bool kOptimizedBuild = true;
#else
constexpr bool kOptimizedBuild = false;
#endif

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double time_path_generation(const market::MarketModel& model, const market::TimeGrid& grid,
                            const market::SimOptions& sim) {
    std::atomic<double> guard{0.0};  // keeps the generated paths observable
    const auto t0 = Clock::now();
    market::for_each_path(model, grid, sim,
                          [&](std::size_t, std::span<const double> spot) {
                              guard.store(spot.back(), std::memory_order_relaxed);
                          });
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const ou::GouSamplerKind kBenchSamplers[] = {
    ou::GouSamplerKind::JumpTime,
    ou::GouSamplerKind::PolyaMixture,
    ou::GouSamplerKind::RandomRate,
};

}  // namespace

BenchReport run_bench(const RunConfig& cfg) {
    if (!kOptimizedBuild && !cfg.bench.force) {
        throw DomainError(
            "bench: refusing to measure an unoptimized build (set bench.force to override)");
    }
    if (cfg.bench.reps < 1) throw ConfigError("bench.reps: must be >= 1");

    BenchReport report;
    report.hardware_threads = static_cast<int>(std::thread::hardware_concurrency());
    report.workers = cfg.workers;
    report.build_profile = kOptimizedBuild ? "optimized" : "debug";

    const auto grid = market::TimeGrid::daily(cfg.horizon_years, cfg.steps_per_year);

    for (std::size_t n : cfg.bench.ladder) {
        double polya_seconds = 0.0;
        for (const auto kind : kBenchSamplers) {
            market::MarketModel model = cfg.model;
            model.sampler = kind;
            market::SimOptions sim{n, cfg.seed, cfg.workers, false};
            std::vector<double> times;
            for (int rep = 0; rep < cfg.bench.warmup + cfg.bench.reps; ++rep) {
                const double s = time_path_generation(model, grid, sim);
                if (rep >= cfg.bench.warmup) times.push_back(s);
            }
            BenchPathRow row;
            row.sampler = std::string(ou::to_string(kind));
            row.n_paths = n;
            row.median_seconds = median(times);
            if (kind == ou::GouSamplerKind::PolyaMixture) polya_seconds = row.median_seconds;
            report.path_rows.push_back(row);
        }
        for (auto& row : report.path_rows) {
            if (row.n_paths == n && polya_seconds > 0.0) {
                row.ratio_vs_polya = row.median_seconds / polya_seconds;
            }
        }
    }

    if (cfg.bench.include_lsmc) {
        const pricing::StorageSpec spec =
            cfg.contract == ContractType::Storage
                ? cfg.storage
                : (cfg.contract == ContractType::Swing ? pricing::to_storage(cfg.swing)
                                                       : pricing::StorageSpec{});
        const pricing::LsmcConfig lsmc =
            cfg.contract == ContractType::Swing && cfg.lsmc.volume_step > cfg.swing.a_w
                ? pricing::LsmcConfig{cfg.swing.a_w, cfg.lsmc.basis_degree}
                : cfg.lsmc;
        double polya_total = 0.0, polya_path = 0.0;
        for (const auto kind : kBenchSamplers) {
            market::MarketModel model = cfg.model;
            model.sampler = kind;
            market::SimOptions sim{cfg.bench.lsmc_n_paths, cfg.seed, cfg.workers, false};
            std::vector<double> totals, paths;
            for (int rep = 0; rep < cfg.bench.warmup + cfg.bench.reps; ++rep) {
                const auto rv =
                    pricing::lsmc_value(model, spec, lsmc, sim, cfg.steps_per_year);
                if (rep >= cfg.bench.warmup) {
                    totals.push_back(rv.total_seconds);
                    paths.push_back(rv.path_seconds);
                }
            }
            BenchLsmcRow row;
            row.sampler = std::string(ou::to_string(kind));
            row.n_paths = cfg.bench.lsmc_n_paths;
            row.median_total_seconds = median(totals);
            row.median_path_seconds = median(paths);
            if (kind == ou::GouSamplerKind::PolyaMixture) {
                polya_total = row.median_total_seconds;
                polya_path = row.median_path_seconds;
            }
            report.lsmc_rows.push_back(row);
        }
        for (auto& row : report.lsmc_rows) {
            if (polya_total > 0.0) row.total_ratio_vs_polya = row.median_total_seconds / polya_total;
            if (polya_path > 0.0) row.path_ratio_vs_polya = row.median_path_seconds / polya_path;
        }
    }
    return report;
}

std::string BenchReport::to_csv() const {
    std::ostringstream os;
    os << "kind,sampler,n_paths,median_path_seconds,median_total_seconds,"
          "path_ratio_vs_polya,total_ratio_vs_polya\n";
    for (const auto& r : path_rows) {
        os << "path," << r.sampler << ',' << r.n_paths << ','
           << csvio::number(r.median_seconds) << ",," << csvio::number(r.ratio_vs_polya)
           << ",\n";
    }
    for (const auto& r : lsmc_rows) {
        os << "lsmc," << r.sampler << ',' << r.n_paths << ','
           << csvio::number(r.median_path_seconds) << ','
           << csvio::number(r.median_total_seconds) << ','
           << csvio::number(r.path_ratio_vs_polya) << ','
           << csvio::number(r.total_ratio_vs_polya) << '\n';
    }
    return os.str();
}

std::string BenchReport::summary() const {
    std::ostringstream os;
    os << "bench: build=" << build_profile << " hardware_threads=" << hardware_threads
       << " workers=" << workers << '\n';
    for (const auto& r : path_rows) {
        os << "  path " << r.sampler << " n=" << r.n_paths << " median=" << r.median_seconds
           << "s ratio_vs_polya=" << r.ratio_vs_polya << '\n';
    }
    for (const auto& r : lsmc_rows) {
        os << "  lsmc " << r.sampler << " n=" << r.n_paths
           << " path=" << r.median_path_seconds << "s total=" << r.median_total_seconds
           << "s path_ratio=" << r.path_ratio_vs_polya
           << " total_ratio=" << r.total_ratio_vs_polya << '\n';
    }
    return os.str();
}

}  // namespace spotsim::app
