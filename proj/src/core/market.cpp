#include "market.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "errors.hpp"
#include "variates.hpp"

namespace spotsim::market {

namespace {

constexpr std::complex<double> kMinusI{0.0, -1.0};
constexpr std::complex<double> kPlusI{0.0, 1.0};

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_blocks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& run_block) {
    const int w = std::min<std::size_t>(resolve_workers(workers), n == 0 ? 1 : n);
    if (w <= 1) {
        run_block(0, n);
        return;
    }
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int i = 0; i < w; ++i) {
        const std::size_t lo = static_cast<std::size_t>(i) * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            try {
                run_block(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Daily sub-grid of [0, t] used when a drift value is requested off-grid for a
/// seasonal Case-3 intensity.
std::vector<double> daily_grid_to(double t) {
    std::vector<double> g{0.0};
    const double dt = 1.0 / 365.0;
    for (int m = 1; m * dt < t - 1e-12; ++m) g.push_back(m * dt);
    g.push_back(t);
    return g;
}

}  // namespace

// --- ForwardCurve ------------------------------------------------------------

ForwardCurve::ForwardCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {}

ForwardCurve ForwardCurve::flat(double level) {
    if (!(level > 0.0)) throw DomainError("forward curve: level must be positive");
    return ForwardCurve({}, {level});
}

ForwardCurve ForwardCurve::tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size()) {
        throw DomainError("forward curve: times and values must be non-empty and equal-sized");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw DomainError("forward curve: times must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!(v > 0.0)) throw DomainError("forward curve: values must be positive");
    }
    return ForwardCurve(std::move(times), std::move(values));
}

double ForwardCurve::operator()(double t) const {
    if (times_.empty()) return values_.front();
    // step interpolation: value of the interval containing t
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t idx = it == times_.begin()
                                ? 0
                                : static_cast<std::size_t>(it - times_.begin()) - 1;
    return values_[std::min(idx, values_.size() - 1)];
}

// --- TimeGrid -----------------------------------------------------------------

TimeGrid TimeGrid::daily(double horizon_years, int steps_per_year) {
    if (!(horizon_years > 0.0) || steps_per_year < 1) {
        throw DomainError("time grid: horizon and steps_per_year must be positive");
    }
    const auto steps =
        static_cast<std::size_t>(std::llround(horizon_years * steps_per_year));
    return uniform(horizon_years, std::max<std::size_t>(steps, 1));
}

TimeGrid TimeGrid::uniform(double horizon_years, std::size_t steps) {
    if (!(horizon_years > 0.0) || steps < 1) {
        throw DomainError("time grid: horizon and steps must be positive");
    }
    TimeGrid g;
    g.t.resize(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
        g.t[m] = horizon_years * static_cast<double>(m) / static_cast<double>(steps);
    }
    return g;
}

void TimeGrid::validate() const {
    if (t.size() < 2 || t.front() != 0.0) {
        throw DomainError("time grid: need t_0 = 0 and at least one step");
    }
    for (std::size_t m = 1; m < t.size(); ++m) {
        if (!(t[m] > t[m - 1])) throw DomainError("time grid: must be strictly increasing");
    }
}

// --- MarketModel ----------------------------------------------------------------

void MarketModel::validate() const {
    diffusion.validate();
    if (const auto* c1 = std::get_if<Case1Jumps>(&jumps)) {
        if (!(c1->k > 0.0)) throw DomainError("model.k: must be > 0");
        if (!(c1->lambda >= 0.0)) throw DomainError("model.lambda: must be >= 0");
        if (!(c1->p >= 0.0 && c1->p <= 1.0)) throw DomainError("model.p: must lie in [0, 1]");
        if (!(c1->beta1 > 1.0)) throw DomainError("model.beta1: must be > 1 for a finite drift");
        if (!(c1->beta2 > 1.0)) throw DomainError("model.beta2: must be > 1 for a finite drift");
        if (case1_route == Case1Route::SingleKou &&
            sampler != ou::GouSamplerKind::JumpTime) {
            throw ConfigError("model: the single-kou route supports the jumptime sampler only");
        }
    } else if (const auto* c2 = std::get_if<Case2Jumps>(&jumps)) {
        if (!(c2->k1 > 0.0) || !(c2->k2 > 0.0)) throw DomainError("model.k1/k2: must be > 0");
        if (!(c2->lambda1 >= 0.0) || !(c2->lambda2 >= 0.0)) {
            throw DomainError("model.lambda1/lambda2: must be >= 0");
        }
        if (!(c2->beta1 > 1.0)) throw DomainError("model.beta1: must be > 1 for a finite drift");
        if (!(c2->beta2 > 1.0)) throw DomainError("model.beta2: must be > 1 for a finite drift");
    } else if (const auto* c3 = std::get_if<Case3Jumps>(&jumps)) {
        if (!(c3->k > 0.0)) throw DomainError("model.k: must be > 0");
        if (!(c3->beta > 1.0)) throw DomainError("model.beta: must be > 1 for a finite drift");
        if (c3->seasonal) {
            if (!(c3->seasonal->theta > 0.0) || !(c3->seasonal->omega > 0.0)) {
                throw DomainError("model.intensity: theta and omega must be > 0");
            }
        } else if (!(c3->constant_intensity >= 0.0)) {
            throw DomainError("model.intensity: must be >= 0");
        }
    }
    if (sampler == ou::GouSamplerKind::EulerBiased && !allow_biased) {
        throw ConfigError(
            "simulation.sampler: 'euler' is biased and requires allow_biased=true");
    }
}

// --- drift ---------------------------------------------------------------------

namespace {

ou::StepwiseIntensity case3_intensity(const Case3Jumps& c3, const std::vector<double>& grid) {
    if (c3.seasonal) {
        return ou::intensity_on_grid(c3.seasonal->theta, c3.seasonal->omega,
                                     c3.seasonal->tau, grid);
    }
    ou::StepwiseIntensity out;
    out.grid = grid;
    out.values.assign(grid.size() - 1, c3.constant_intensity);
    return out;
}

double log_mgf_diffusion(const ou::GaussianOuParams& d, double t) {
    const double decay = std::exp(-d.k_d * t);
    return d.x0 * decay +
           d.sigma * d.sigma / (4.0 * d.k_d) * (1.0 - decay * decay);
}

}  // namespace

double drift_h_generic(const MarketModel& model, double t) {
    model.validate();
    if (t == 0.0) return 0.0;
    // log E[e^H] assembled from the factor chfs: upward legs at u = -i,
    // downward legs at u = +i.
    std::complex<double> log_phi = log_mgf_diffusion(model.diffusion, t);
    if (const auto* c1 = std::get_if<Case1Jumps>(&model.jumps)) {
        const ou::GouParams up{c1->k, c1->p * c1->lambda, c1->beta1, model.y1_0};
        const ou::GouParams down{c1->k, (1.0 - c1->p) * c1->lambda, c1->beta2, model.y2_0};
        log_phi += std::log(ou::gou_chf(kMinusI, t, up));
        log_phi += std::log(ou::gou_chf(kPlusI, t, down));
    } else if (const auto* c2 = std::get_if<Case2Jumps>(&model.jumps)) {
        const ou::GouParams up{c2->k1, c2->lambda1, c2->beta1, model.y1_0};
        const ou::GouParams down{c2->k2, c2->lambda2, c2->beta2, model.y2_0};
        log_phi += std::log(ou::gou_chf(kMinusI, t, up));
        log_phi += std::log(ou::gou_chf(kPlusI, t, down));
    } else if (const auto* c3 = std::get_if<Case3Jumps>(&model.jumps)) {
        const double y0 = model.y1_0 - model.y2_0;
        if (c3->seasonal) {
            const auto intensity = case3_intensity(*c3, daily_grid_to(t));
            log_phi +=
                std::log(ou::sym_bgou_chf_stepwise(kMinusI, t, c3->k, c3->beta, intensity, y0));
        } else {
            const ou::SymBgouParams p{c3->k, c3->constant_intensity, c3->beta, y0};
            log_phi += std::log(ou::sym_bgou_chf(kMinusI, t, p));
        }
    }
    return -log_phi.real();
}

namespace {

// log E[e^{Y}] of an upward exponential-jump OU leg; finite only for beta > 1.
double log_mgf_gou_up(double k, double lambda, double beta, double y0, double t) {
    const double a = std::exp(-k * t);
    return y0 * a + lambda / k * std::log((beta - a) / (beta - 1.0));
}

// log E[e^{-Y}] of a downward leg; finite for every beta > 0.
double log_mgf_gou_down(double k, double lambda, double beta, double y0, double t) {
    const double a = std::exp(-k * t);
    return -y0 * a + lambda / k * std::log((beta + a) / (beta + 1.0));
}

double log_mgf_sym_bgou_stepwise(double k, double beta, double y0, double t,
                                 const ou::StepwiseIntensity& intensity) {
    const double b2 = beta * beta;
    double acc = y0 * std::exp(-k * t);
    for (std::size_t m = 0; m < intensity.values.size(); ++m) {
        const double s_lo = intensity.grid[m];
        if (s_lo >= t) break;
        const double s_hi = std::min(intensity.grid[m + 1], t);
        const double d_lo = std::exp(-k * (t - s_lo));
        const double d_hi = std::exp(-k * (t - s_hi));
        acc += intensity.values[m] / (2.0 * k) *
               std::log((b2 - d_lo * d_lo) / (b2 - d_hi * d_hi));
    }
    return acc;
}

}  // namespace

double drift_h_closed(const MarketModel& model, double t) {
    model.validate();
    if (t == 0.0) return 0.0;
    double log_phi = log_mgf_diffusion(model.diffusion, t);
    if (const auto* c1 = std::get_if<Case1Jumps>(&model.jumps)) {
        log_phi += log_mgf_gou_up(c1->k, c1->p * c1->lambda, c1->beta1, model.y1_0, t);
        log_phi +=
            log_mgf_gou_down(c1->k, (1.0 - c1->p) * c1->lambda, c1->beta2, model.y2_0, t);
    } else if (const auto* c2 = std::get_if<Case2Jumps>(&model.jumps)) {
        log_phi += log_mgf_gou_up(c2->k1, c2->lambda1, c2->beta1, model.y1_0, t);
        log_phi += log_mgf_gou_down(c2->k2, c2->lambda2, c2->beta2, model.y2_0, t);
    } else if (const auto* c3 = std::get_if<Case3Jumps>(&model.jumps)) {
        const double y0 = model.y1_0 - model.y2_0;
        if (c3->seasonal) {
            const auto intensity = case3_intensity(*c3, daily_grid_to(t));
            log_phi += log_mgf_sym_bgou_stepwise(c3->k, c3->beta, y0, t, intensity);
        } else {
            const double a = std::exp(-c3->k * t);
            const double b2 = c3->beta * c3->beta;
            log_phi += y0 * a + c3->constant_intensity / (2.0 * c3->k) *
                                    std::log((b2 - a * a) / (b2 - 1.0));
        }
    }
    return -log_phi;
}

std::vector<double> drift_table(const MarketModel& model, const TimeGrid& grid) {
    grid.validate();
    model.validate();
    std::vector<double> h(grid.t.size(), 0.0);
    if (const auto* c3 = std::get_if<Case3Jumps>(&model.jumps); c3 && c3->seasonal) {
        // Accumulate the step-wise intensity on the simulation grid itself.
        const auto intensity = case3_intensity(*c3, grid.t);
        const double y0 = model.y1_0 - model.y2_0;
        for (std::size_t m = 1; m < grid.t.size(); ++m) {
            const double t = grid.t[m];
            h[m] = -(log_mgf_diffusion(model.diffusion, t) +
                     log_mgf_sym_bgou_stepwise(c3->k, c3->beta, y0, t, intensity));
        }
        return h;
    }
    for (std::size_t m = 1; m < grid.t.size(); ++m) h[m] = drift_h_closed(model, grid.t[m]);
    return h;
}

// --- path engine -----------------------------------------------------------------

namespace {

struct LegSpec {
    double k = 1.0;
    double beta = 1.0;
    double y0 = 0.0;
    std::vector<double> lambda;  // per step, size M
    bool negative = false;       // enters the spot exponent with a minus sign
};

struct Engine {
    const MarketModel* model = nullptr;
    TimeGrid grid;
    std::vector<double> dt;       // per step
    std::vector<double> h;        // per grid point
    std::vector<double> fwd;      // per grid point
    std::vector<double> decay_d;  // diffusion decay per step
    std::vector<double> sd_d;     // diffusion innovation sd per step
    std::vector<LegSpec> legs;
    // Case-3 combined route
    bool sym_combined = false;
    ou::SymBgouParams sym{1.0, 0.0, 1.0, 0.0};
    std::vector<double> sym_lambda;
    // Case-1 single-compound route (jumptime only); factor diagnostics report the
    // net jump factor in the y1 slot.
    bool single_kou = false;
    Case1Jumps kou;

    void build(const MarketModel& m, const TimeGrid& g);
    void simulate_path(std::uint64_t seed, std::size_t path, std::span<double> spot,
                       double* fx, double* fy1, double* fy2) const;
};

void Engine::build(const MarketModel& m, const TimeGrid& g) {
    m.validate();
    g.validate();
    model = &m;
    grid = g;
    const std::size_t steps = g.steps();
    dt.resize(steps);
    decay_d.resize(steps);
    sd_d.resize(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        dt[s] = g.dt(s + 1);
        decay_d[s] = std::exp(-m.diffusion.k_d * dt[s]);
        sd_d[s] = m.diffusion.sigma *
                  std::sqrt((1.0 - decay_d[s] * decay_d[s]) / (2.0 * m.diffusion.k_d));
    }
    h = drift_table(m, g);
    fwd.resize(g.t.size());
    for (std::size_t i = 0; i < g.t.size(); ++i) fwd[i] = m.forward(g.t[i]);

    if (const auto* c1 = std::get_if<Case1Jumps>(&m.jumps)) {
        if (m.case1_route == Case1Route::SingleKou) {
            single_kou = true;
            kou = *c1;
        } else {
            legs.push_back({c1->k, c1->beta1, m.y1_0,
                            std::vector<double>(steps, c1->p * c1->lambda), false});
            legs.push_back({c1->k, c1->beta2, m.y2_0,
                            std::vector<double>(steps, (1.0 - c1->p) * c1->lambda), true});
        }
    } else if (const auto* c2 = std::get_if<Case2Jumps>(&m.jumps)) {
        legs.push_back({c2->k1, c2->beta1, m.y1_0,
                        std::vector<double>(steps, c2->lambda1), false});
        legs.push_back({c2->k2, c2->beta2, m.y2_0,
                        std::vector<double>(steps, c2->lambda2), true});
    } else if (const auto* c3 = std::get_if<Case3Jumps>(&m.jumps)) {
        const auto intensity = case3_intensity(*c3, g.t);
        if (m.case3_route == Case3Route::Combined) {
            sym_combined = true;
            sym = ou::SymBgouParams{c3->k, 0.0, c3->beta, m.y1_0 - m.y2_0};
            sym_lambda = intensity.values;
        } else {
            std::vector<double> half(intensity.values.size());
            for (std::size_t s = 0; s < half.size(); ++s) half[s] = 0.5 * intensity.values[s];
            legs.push_back({c3->k, c3->beta, m.y1_0, half, false});
            legs.push_back({c3->k, c3->beta, m.y2_0, half, true});
        }
    }
}

void Engine::simulate_path(std::uint64_t seed, std::size_t path, std::span<double> spot,
                           double* fx, double* fy1, double* fy2) const {
    RngStream rng(seed, path);
    const MarketModel& m = *model;
    const std::size_t steps = grid.steps();

    double x = m.diffusion.x0;
    double y1 = single_kou ? (m.y1_0 - m.y2_0) : (sym_combined ? sym.y0 : 0.0);
    double y2 = 0.0;
    if (!single_kou && !sym_combined) {
        y1 = legs.empty() ? 0.0 : legs[0].y0;
        y2 = legs.size() > 1 ? legs[1].y0 : 0.0;
    }

    auto emit = [&](std::size_t mdx, double xx, double yy1, double yy2) {
        spot[mdx] = fwd[mdx] * std::exp(h[mdx] + xx + yy1 - yy2);
        if (fx) fx[mdx] = xx;
        if (fy1) fy1[mdx] = yy1;
        if (fy2) fy2[mdx] = yy2;
    };
    emit(0, x, y1, y2);

    for (std::size_t s = 0; s < steps; ++s) {
        const double step_dt = dt[s];
        // fixed draw order per step: diffusion first, then the jump factor(s)
        x = x * decay_d[s] + (m.diffusion.sigma == 0.0 ? 0.0 : sd_d[s] * rng.normal());
        if (single_kou) {
            double inc = 0.0;
            const long long n = kou.lambda > 0.0
                                    ? variates::sample_poisson(kou.lambda * step_dt, rng)
                                    : 0;
            for (long long j = 0; j < n; ++j) {
                const double tau = step_dt * rng.uniform();
                const double decay = std::exp(-kou.k * (step_dt - tau));
                if (rng.uniform() < kou.p) {
                    inc += decay * rng.exponential(kou.beta1);
                } else {
                    inc -= decay * rng.exponential(kou.beta2);
                }
            }
            y1 = y1 * std::exp(-kou.k * step_dt) + inc;
        } else if (sym_combined) {
            ou::SymBgouParams p = sym;
            p.lambda = sym_lambda[s];
            y1 = ou::sym_bgou_step(m.sampler, p, y1, step_dt, rng, m.sort_jump_times);
        } else {
            for (std::size_t l = 0; l < legs.size(); ++l) {
                const LegSpec& leg = legs[l];
                const ou::GouParams p{leg.k, leg.lambda[s], leg.beta, 0.0};
                double& y = leg.negative ? y2 : y1;
                y = ou::gou_step(m.sampler, p, y, step_dt, rng, m.sort_jump_times);
            }
        }
        emit(s + 1, x, y1, y2);
    }
}

}  // namespace

PathBatch simulate_paths(const MarketModel& model, const TimeGrid& grid,
                         const SimOptions& opts) {
    if (opts.n_paths < 1) throw DomainError("simulate: n_paths must be >= 1");
    Engine eng;
    eng.build(model, grid);
    PathBatch batch;
    batch.grid = grid;
    batch.n_paths = opts.n_paths;
    const std::size_t width = grid.t.size();
    batch.spot.resize(opts.n_paths * width);
    if (opts.retain_factors) {
        batch.factor_x.resize(opts.n_paths * width);
        batch.factor_y1.resize(opts.n_paths * width);
        batch.factor_y2.resize(opts.n_paths * width);
    }
    parallel_blocks(opts.n_paths, opts.workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            double* fx = opts.retain_factors ? batch.factor_x.data() + p * width : nullptr;
            double* f1 = opts.retain_factors ? batch.factor_y1.data() + p * width : nullptr;
            double* f2 = opts.retain_factors ? batch.factor_y2.data() + p * width : nullptr;
            eng.simulate_path(opts.seed, p, {batch.spot.data() + p * width, width}, fx, f1,
                              f2);
        }
    });
    return batch;
}

void for_each_path(const MarketModel& model, const TimeGrid& grid, const SimOptions& opts,
                   const std::function<void(std::size_t, std::span<const double>)>& sink) {
    if (opts.n_paths < 1) throw DomainError("simulate: n_paths must be >= 1");
    Engine eng;
    eng.build(model, grid);
    const std::size_t width = grid.t.size();
    parallel_blocks(opts.n_paths, opts.workers, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> row(width);
        for (std::size_t p = lo; p < hi; ++p) {
            eng.simulate_path(opts.seed, p, row, nullptr, nullptr, nullptr);
            sink(p, row);
        }
    });
}

}  // namespace spotsim::market
