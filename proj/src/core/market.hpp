#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ou_kernels.hpp"

namespace spotsim::market {

/// Initial forward curve t -> F(0,t), flat or tabulated with step interpolation.
class ForwardCurve {
public:
    ForwardCurve() : ForwardCurve(flat(1.0)) {}

    static ForwardCurve flat(double level);
    static ForwardCurve tabulated(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    bool is_flat() const { return times_.empty(); }
    double flat_level() const { return values_.front(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

private:
    ForwardCurve(std::vector<double> times, std::vector<double> values);

    std::vector<double> times_;   // empty for a flat curve
    std::vector<double> values_;  // single entry for a flat curve
};

/// Simulation grid t_0 = 0 < t_1 < ... < t_M, daily by default.
struct TimeGrid {
    std::vector<double> t;

    static TimeGrid daily(double horizon_years, int steps_per_year = 365);
    static TimeGrid uniform(double horizon_years, std::size_t steps);

    std::size_t steps() const { return t.empty() ? 0 : t.size() - 1; }
    double horizon() const { return t.back(); }
    double dt(std::size_t m) const { return t[m] - t[m - 1]; }  // step m in 1..M
    void validate() const;
};

// Jump-factor specifications of the three market models.

/// Single compound Poisson with two-sided mixture jumps (up with probability p,
/// rate beta1; down with probability 1-p, rate beta2), mean reversion k.
/// Decomposes into two one-sided legs with intensities p*lambda and (1-p)*lambda.
struct Case1Jumps {
    double k = 50.0;
    double lambda = 20.0;
    double p = 0.5;
    double beta1 = 10.0;
    double beta2 = 20.0;
};

/// Two independent one-sided legs with their own mean reversions and intensities.
struct Case2Jumps {
    double k1 = 50.0;
    double k2 = 40.0;
    double lambda1 = 20.0;
    double lambda2 = 20.0;
    double beta1 = 10.0;
    double beta2 = 20.0;
};

struct SeasonalIntensitySpec {
    double theta = 32.0;
    double omega = 2.0;
    double tau = 0.25;
};

/// Centered Laplace jumps with mean reversion k; intensity either constant or
/// the seasonal function approximated step-wise on the simulation grid.
struct Case3Jumps {
    double k = 50.0;
    double beta = 20.0;
    double constant_intensity = 40.0;
    std::optional<SeasonalIntensitySpec> seasonal;
};

enum class Case1Route { TwoLeg, SingleKou };
enum class Case3Route { Combined, TwoLeg };

struct MarketModel {
    ou::GaussianOuParams diffusion{67.0, 0.25, 0.0};
    std::variant<Case1Jumps, Case2Jumps, Case3Jumps> jumps = Case1Jumps{};
    ForwardCurve forward = ForwardCurve::flat(22.0);
    ou::GouSamplerKind sampler = ou::GouSamplerKind::PolyaMixture;
    Case1Route case1_route = Case1Route::TwoLeg;
    Case3Route case3_route = Case3Route::Combined;
    bool sort_jump_times = false;
    bool allow_biased = false;
    double rate = 0.0;  // flat discount rate; the default pricing setup is undiscounted
    double y1_0 = 0.0;  // initial levels of the jump legs
    double y2_0 = 0.0;

    int jump_case() const { return static_cast<int>(jumps.index()) + 1; }
    void validate() const;
};

/// Simulated spot paths, row-major n_paths x (M+1). Factor paths are retained
/// only when requested.
struct PathBatch {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> spot;
    std::vector<double> factor_x, factor_y1, factor_y2;

    std::span<const double> row(std::size_t path) const {
        const std::size_t w = grid.t.size();
        return {spot.data() + path * w, w};
    }
    double at(std::size_t path, std::size_t m) const {
        return spot[path * grid.t.size() + m];
    }
};

/// Per-interval jump intensities of each leg on a grid (constant cases repeat
/// the same value).
std::vector<double> leg_intensities_on_grid(const MarketModel& model, int leg,
                                            const TimeGrid& grid);

/// Risk-neutral drift from the product of the factor characteristic functions
/// evaluated at u = -i. Requires the upward jump rates to exceed 1.
double drift_h_generic(const MarketModel& model, double t);

/// Closed-form drift of the active case (Case 3 accumulates the step-wise
/// intensity over a daily grid). Agrees with drift_h_generic to round-off.
double drift_h_closed(const MarketModel& model, double t);

/// Drift table h(t_m) for every grid point, closed form.
std::vector<double> drift_table(const MarketModel& model, const TimeGrid& grid);

struct SimOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 42;
    int workers = 0;  // 0 = hardware concurrency
    bool retain_factors = false;
};

/// Simulates the full batch; deterministic for a fixed seed, with one RNG
/// stream per path so the result is independent of the worker count.
PathBatch simulate_paths(const MarketModel& model, const TimeGrid& grid,
                         const SimOptions& opts);

/// Streaming variant: calls sink(path_index, spot_path) for every path without
/// materializing the batch. The sink is invoked concurrently for distinct paths.
void for_each_path(const MarketModel& model, const TimeGrid& grid, const SimOptions& opts,
                   const std::function<void(std::size_t, std::span<const double>)>& sink);

}  // namespace spotsim::market
