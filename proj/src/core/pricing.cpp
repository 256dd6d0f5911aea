#include "pricing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "stats.hpp"

namespace spotsim::pricing {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_multiple(double value, double step) {
    if (step <= 0.0) return false;
    const double r = value / step;
    return std::abs(r - std::llround(r)) < 1e-9;
}

long long level_count(double value, double step) { return std::llround(value / step); }

}  // namespace

void StorageSpec::validate(double volume_step) const {
    if (!(c_min <= c_start && c_start <= c_max)) {
        throw DomainError("storage: need c_min <= c_start <= c_max");
    }
    if (!(c_min <= c_end_target && c_end_target <= c_max)) {
        throw DomainError("storage: need c_min <= c_end_target <= c_max");
    }
    if (!(a_in >= 0.0) || !(a_w >= 0.0)) {
        throw DomainError("storage: injection and withdrawal rates must be >= 0");
    }
    if (!(horizon_years > 0.0)) throw DomainError("storage: horizon must be positive");
    if (!(volume_step > 0.0)) throw DomainError("lsmc: volume_step must be positive");
    for (double v : {c_max - c_min, c_start - c_min, c_end_target - c_min, a_in, a_w}) {
        if (!is_multiple(v, volume_step)) {
            throw DomainError(
                "lsmc: volume grid step must divide the volume bounds and the daily rates");
        }
    }
}

StorageSpec to_storage(const SwingSpec& swing) {
    StorageSpec s;
    s.c_min = 0.0;
    s.c_max = swing.rights;
    s.c_start = swing.rights;
    s.c_end_target = 0.0;
    s.a_in = 0.0;
    s.a_w = swing.a_w;
    s.k_in = 0.0;
    s.k_out = swing.strike;  // the withdrawal cost plays the strike
    s.k_n = 0.0;
    s.horizon_years = swing.horizon_years;
    return s;
}

std::string ValuationReport::summary_line() const {
    std::ostringstream os;
    os << contract << " price=" << price << " rmse=" << rmse << " n_paths=" << n_paths
       << " sampler=" << sampler << " path_s=" << path_seconds << " opt_s=" << opt_seconds
       << " total_s=" << total_seconds;
    return os.str();
}

ValuationReport price_asian(const market::MarketModel& model, const AsianSpec& spec,
                            const market::SimOptions& sim, int steps_per_year) {
    const auto t_start = Clock::now();
    if (!(spec.strike >= 0.0)) throw DomainError("asian: strike must be >= 0");
    if (!(spec.maturity > 0.0)) throw DomainError("asian: maturity must be positive");
    const auto grid = market::TimeGrid::daily(spec.maturity, steps_per_year);

    std::vector<std::size_t> fixings = spec.fixings;
    if (fixings.empty()) {
        for (std::size_t m = 1; m < grid.t.size(); ++m) fixings.push_back(m);
    }
    for (std::size_t f : fixings) {
        if (f == 0 || f >= grid.t.size()) {
            throw DomainError("asian: fixing index outside the simulation grid");
        }
    }
    const double inv_count = 1.0 / static_cast<double>(fixings.size());
    const double discount = std::exp(-model.rate * spec.maturity);

    std::vector<double> payoffs(sim.n_paths);
    const auto t_path = Clock::now();
    market::for_each_path(model, grid, sim,
                          [&](std::size_t p, std::span<const double> spot) {
                              double avg = 0.0;
                              for (std::size_t f : fixings) avg += spot[f];
                              avg *= inv_count;
                              payoffs[p] = discount * std::max(avg - spec.strike, 0.0);
                          });
    const double path_seconds = seconds_since(t_path);

    const auto t_opt = Clock::now();
    const auto mv = stats::mean_var(payoffs);
    ValuationReport report;
    report.price = mv.mean;
    report.rmse = mv.se_mean;
    report.path_seconds = path_seconds;
    report.opt_seconds = seconds_since(t_opt);
    report.total_seconds = seconds_since(t_start);
    report.contract = "asian";
    report.sampler = std::string(ou::to_string(model.sampler));
    report.n_paths = sim.n_paths;
    return report;
}

// --- LSMC ----------------------------------------------------------------------

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct VolumeGrid {
    double c_min = 0.0;
    double step = 1.0;
    long long levels = 0;  // indices 0..levels
    long long shift_in = 0;
    long long shift_out = 0;
    long long start = 0;
    long long target = 0;

    // A regime is admissible only when the full rate fits inside the bounds;
    // clamped no-op moves at the boundary would otherwise still collect cash.
    bool can_inject(long long j) const { return j + shift_in <= levels; }
    bool can_withdraw(long long j) const { return j - shift_out >= 0; }
};

VolumeGrid make_volume_grid(const StorageSpec& spec, double volume_step) {
    spec.validate(volume_step);
    VolumeGrid g;
    g.c_min = spec.c_min;
    g.step = volume_step;
    g.levels = level_count(spec.c_max - spec.c_min, volume_step);
    g.shift_in = level_count(spec.a_in, volume_step);
    g.shift_out = level_count(spec.a_w, volume_step);
    g.start = level_count(spec.c_start - spec.c_min, volume_step);
    g.target = level_count(spec.c_end_target - spec.c_min, volume_step);
    return g;
}

/// stage s in 0..n_decisions; stage 0 holds only the start level.
std::vector<std::vector<bool>> envelope(const VolumeGrid& g, std::size_t n_decisions,
                                        bool hard_terminal) {
    const std::size_t width = static_cast<std::size_t>(g.levels) + 1;
    std::vector<std::vector<bool>> forward(n_decisions + 1,
                                           std::vector<bool>(width, false));
    forward[0][static_cast<std::size_t>(g.start)] = true;
    for (std::size_t s = 0; s < n_decisions; ++s) {
        for (std::size_t j = 0; j < width; ++j) {
            if (!forward[s][j]) continue;
            const auto jj = static_cast<long long>(j);
            if (g.can_inject(jj)) {
                forward[s + 1][static_cast<std::size_t>(jj + g.shift_in)] = true;
            }
            forward[s + 1][j] = true;
            if (g.can_withdraw(jj)) {
                forward[s + 1][static_cast<std::size_t>(jj - g.shift_out)] = true;
            }
        }
    }
    std::vector<std::vector<bool>> backward(n_decisions + 1,
                                            std::vector<bool>(width, !hard_terminal));
    if (hard_terminal) backward[n_decisions][static_cast<std::size_t>(g.target)] = true;
    for (std::size_t s = n_decisions; s-- > 0;) {
        for (std::size_t j = 0; j < width; ++j) {
            const auto jj = static_cast<long long>(j);
            backward[s][j] =
                (g.can_inject(jj) &&
                 backward[s + 1][static_cast<std::size_t>(jj + g.shift_in)]) ||
                backward[s + 1][j] ||
                (g.can_withdraw(jj) &&
                 backward[s + 1][static_cast<std::size_t>(jj - g.shift_out)]);
        }
    }
    std::vector<std::vector<bool>> feasible(n_decisions + 1, std::vector<bool>(width));
    for (std::size_t s = 0; s <= n_decisions; ++s) {
        for (std::size_t j = 0; j < width; ++j) feasible[s][j] = forward[s][j] && backward[s][j];
    }
    return feasible;
}

/// Least-squares fit of y on centered monomials of x, with the degree reduced
/// automatically when the normal equations are numerically singular.
struct Regression {
    double x_center = 0.0;
    int degree = 0;
    double coeff[8] = {0.0};

    double value(double x) const {
        const double xc = x - x_center;
        double acc = coeff[degree];
        for (int d = degree - 1; d >= 0; --d) acc = acc * xc + coeff[d];
        return acc;
    }
};

/// Cholesky solve of the (dim x dim) normal equations; false when a pivot
/// degenerates relative to the matrix scale.
bool cholesky_solve(const double* ata, const double* aty, int dim, double* out) {
    double l[8][8] = {};
    double scale = 0.0;
    for (int i = 0; i < dim; ++i) scale = std::max(scale, std::abs(ata[i * dim + i]));
    if (scale <= 0.0) return false;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = ata[i * dim + j];
            for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
            if (i == j) {
                if (sum <= scale * 1e-12) return false;
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    double z[8];
    for (int i = 0; i < dim; ++i) {
        double sum = aty[i];
        for (int k = 0; k < i; ++k) sum -= l[i][k] * z[k];
        z[i] = sum / l[i][i];
    }
    for (int i = dim - 1; i >= 0; --i) {
        double sum = z[i];
        for (int k = i + 1; k < dim; ++k) sum -= l[k][i] * out[k];
        out[i] = sum / l[i][i];
    }
    return true;
}

}  // namespace

std::vector<std::vector<bool>> feasible_envelope(const StorageSpec& spec,
                                                 double volume_step,
                                                 std::size_t n_decisions) {
    const auto g = make_volume_grid(spec, volume_step);
    return envelope(g, n_decisions, spec.terminal.hard);
}

ValuationReport lsmc_on_paths(const market::PathBatch& batch, const StorageSpec& spec,
                              const LsmcConfig& config, double rate) {
    const auto t_start = Clock::now();
    if (config.basis_degree < 1 || config.basis_degree > 6) {
        throw DomainError("lsmc: basis degree must lie in [1, 6]");
    }
    const std::size_t n = batch.n_paths;
    const std::size_t decisions = batch.grid.steps();
    if (n < static_cast<std::size_t>(config.basis_degree + 1) * 10) {
        throw DomainError("lsmc: need at least 10 paths per basis function");
    }
    const auto grid = make_volume_grid(spec, config.volume_step);
    const std::size_t width = static_cast<std::size_t>(grid.levels) + 1;
    const auto feasible = envelope(grid, decisions, spec.terminal.hard);
    {
        bool any = false;
        for (std::size_t j = 0; j < width; ++j) any = any || feasible[decisions][j];
        if (!any || !feasible[0][static_cast<std::size_t>(grid.start)]) {
            throw FeasibilityError("lsmc: terminal volume target unreachable on this grid");
        }
    }

    // value[j * n + p]: continuation value of holding level j after the current date
    std::vector<double> value(width * n, kNegInf), next(width * n, kNegInf);
    if (spec.terminal.hard) {
        std::fill_n(value.data() + static_cast<std::size_t>(grid.target) * n, n, 0.0);
    } else {
        for (std::size_t j = 0; j < width; ++j) {
            const double pen = -spec.terminal.penalty_per_mwh *
                               std::abs(grid.c_min + static_cast<double>(j) * grid.step -
                                        (grid.c_min + static_cast<double>(grid.target) * grid.step));
            std::fill_n(value.data() + j * n, n, pen);
        }
    }

    std::vector<double> xs(n);
    std::vector<Regression> fits(width);
    std::vector<char> has_fit(width, 0);
    const int max_dim = config.basis_degree + 1;

    for (std::size_t m = decisions; m >= 1; --m) {
        const double t_m = batch.grid.t[m];
        const double discount = rate == 0.0 ? 1.0 : std::exp(-rate * t_m);
        for (std::size_t p = 0; p < n; ++p) xs[p] = std::log(batch.at(p, m));

        // Shared basis moments for this date; per-level regressions reuse them.
        double x_center = 0.0;
        for (double x : xs) x_center += x;
        x_center /= static_cast<double>(n);
        double ata[8 * 8] = {0.0};
        {
            double moments[14] = {0.0};  // sums of (x-c)^q, q = 0..2*degree
            for (double x : xs) {
                const double xc = x - x_center;
                double pw = 1.0;
                for (int q = 0; q <= 2 * config.basis_degree; ++q) {
                    moments[q] += pw;
                    pw *= xc;
                }
            }
            for (int i = 0; i < max_dim; ++i) {
                for (int j = 0; j < max_dim; ++j) ata[i * max_dim + j] = moments[i + j];
            }
        }

        // Degree shrinks when the shared normal equations are singular (constant
        // spot paths reduce to a plain mean).
        int dim = max_dim;
        {
            double probe[8];
            double rhs[8] = {0.0};
            while (dim > 1) {
                double sub[8 * 8];
                for (int i = 0; i < dim; ++i) {
                    for (int j = 0; j < dim; ++j) sub[i * dim + j] = ata[i * max_dim + j];
                }
                if (cholesky_solve(sub, rhs, dim, probe)) break;
                --dim;
            }
        }

        std::fill(has_fit.begin(), has_fit.end(), 0);
        for (std::size_t j = 0; j < width; ++j) {
            if (!feasible[m][j]) continue;
            double aty[8] = {0.0};
            const double* v = value.data() + j * n;
            for (std::size_t p = 0; p < n; ++p) {
                const double xc = xs[p] - x_center;
                double pw = 1.0;
                for (int q = 0; q < dim; ++q) {
                    aty[q] += pw * v[p];
                    pw *= xc;
                }
            }
            double sub[8 * 8];
            for (int i = 0; i < dim; ++i) {
                for (int jj = 0; jj < dim; ++jj) sub[i * dim + jj] = ata[i * max_dim + jj];
            }
            Regression fit;
            fit.x_center = x_center;
            fit.degree = dim - 1;
            if (!cholesky_solve(sub, aty, dim, fit.coeff)) {
                fit.degree = 0;
                double mean = 0.0;
                for (std::size_t p = 0; p < n; ++p) mean += v[p];
                fit.coeff[0] = mean / static_cast<double>(n);
            }
            fits[j] = fit;
            has_fit[j] = 1;
        }

        for (std::size_t j = 0; j < width; ++j) {
            double* out = next.data() + j * n;
            if (!feasible[m - 1][j]) {
                std::fill_n(out, n, kNegInf);
                continue;
            }
            const auto jj = static_cast<long long>(j);
            const long long j_in = std::min(jj + grid.shift_in, grid.levels);
            const long long j_out = std::max(jj - grid.shift_out, 0ll);
            const bool can_in = grid.can_inject(jj) &&
                                feasible[m][static_cast<std::size_t>(j_in)] &&
                                has_fit[static_cast<std::size_t>(j_in)];
            const bool can_idle = feasible[m][j] && has_fit[j];
            const bool can_out = grid.can_withdraw(jj) &&
                                 feasible[m][static_cast<std::size_t>(j_out)] &&
                                 has_fit[static_cast<std::size_t>(j_out)];
            const double* v_in = value.data() + static_cast<std::size_t>(j_in) * n;
            const double* v_idle = value.data() + j * n;
            const double* v_out = value.data() + static_cast<std::size_t>(j_out) * n;
            for (std::size_t p = 0; p < n; ++p) {
                const double s = batch.at(p, m);
                double best = kNegInf, realized = kNegInf;
                if (can_in) {
                    const double cash = discount * (-s - spec.k_in * spec.a_in);
                    const double est = cash + fits[static_cast<std::size_t>(j_in)].value(xs[p]);
                    best = est;
                    realized = cash + v_in[p];
                }
                if (can_idle) {
                    const double cash = discount * (-spec.k_n);
                    const double est = cash + fits[j].value(xs[p]);
                    if (est > best) {
                        best = est;
                        realized = cash + v_idle[p];
                    }
                }
                if (can_out) {
                    const double cash = discount * (s - spec.k_out * spec.a_w);
                    const double est = cash + fits[static_cast<std::size_t>(j_out)].value(xs[p]);
                    if (est > best) {
                        best = est;
                        realized = cash + v_out[p];
                    }
                }
                out[p] = realized;
            }
        }
        value.swap(next);
    }

    const double* v0 = value.data() + static_cast<std::size_t>(grid.start) * n;
    const auto mv = stats::mean_var(std::span<const double>(v0, n));
    ValuationReport report;
    report.price = mv.mean;
    report.rmse = mv.se_mean;
    report.opt_seconds = seconds_since(t_start);
    report.total_seconds = report.opt_seconds;
    report.contract = "storage";
    report.n_paths = n;
    return report;
}

ValuationReport lsmc_value(const market::MarketModel& model, const StorageSpec& spec,
                           const LsmcConfig& config, const market::SimOptions& sim,
                           int steps_per_year) {
    const auto t_start = Clock::now();
    const auto grid = market::TimeGrid::daily(spec.horizon_years, steps_per_year);
    const auto t_path = Clock::now();
    const auto batch = market::simulate_paths(model, grid, sim);
    const double path_seconds = seconds_since(t_path);
    ValuationReport report = lsmc_on_paths(batch, spec, config, model.rate);
    report.path_seconds = path_seconds;
    report.sampler = std::string(ou::to_string(model.sampler));
    report.total_seconds = seconds_since(t_start);
    return report;
}

ValuationReport price_storage(const market::MarketModel& model, const StorageSpec& spec,
                              const LsmcConfig& config, const market::SimOptions& sim,
                              int steps_per_year) {
    return lsmc_value(model, spec, config, sim, steps_per_year);
}

ValuationReport price_swing(const market::MarketModel& model, const SwingSpec& spec,
                            const LsmcConfig& config, const market::SimOptions& sim,
                            int steps_per_year) {
    if (!(spec.strike >= 0.0)) throw DomainError("swing: strike must be >= 0");
    if (!(spec.rights > 0.0)) throw DomainError("swing: rights must be positive");
    LsmcConfig cfg = config;
    if (cfg.volume_step > spec.a_w) cfg.volume_step = spec.a_w;
    ValuationReport report =
        lsmc_value(model, to_storage(spec), cfg, sim, steps_per_year);
    report.contract = "swing";
    return report;
}

}  // namespace spotsim::pricing
