#include "ou_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "variates.hpp"

namespace spotsim::ou {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_positive_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("ou step: dt must be positive, got " + std::to_string(dt));
    }
}

// Draws the Polya mixing index by sequential pmf inversion. `u` is the already
// drawn uniform, `p0` the zero-class mass (1-p)^alpha. The walk is O(E[B]), so
// callers switch to the gamma-Poisson route when the expected index is large.
long long polya_index_by_inversion(double u, double p0, double alpha, double p,
                                   RngStream& rng) {
    const double expected = alpha * p / (1.0 - p);
    if (expected > 256.0) {
        return variates::sample_polya({alpha, p}, rng);
    }
    long long b = 0;
    double term = p0;
    double acc = p0;
    while (u > acc && term > 0.0) {
        term *= p * (alpha + static_cast<double>(b)) / (static_cast<double>(b) + 1.0);
        acc += term;
        ++b;
    }
    return b;
}

}  // namespace

void GaussianOuParams::validate() const {
    if (!(k_d > 0.0)) throw DomainError("gaussian ou: k_d must be > 0");
    if (!(sigma >= 0.0)) throw DomainError("gaussian ou: sigma must be >= 0");
}

void GouParams::validate() const {
    if (!(k > 0.0)) throw DomainError("gou: k must be > 0");
    if (!(lambda >= 0.0)) throw DomainError("gou: lambda must be >= 0");
    if (!(beta > 0.0)) throw DomainError("gou: beta must be > 0");
}

void SymBgouParams::validate() const {
    if (!(k > 0.0)) throw DomainError("sym bgou: k must be > 0");
    if (!(lambda >= 0.0)) throw DomainError("sym bgou: lambda must be >= 0");
    if (!(beta > 0.0)) throw DomainError("sym bgou: beta must be > 0");
}

std::string_view to_string(GouSamplerKind kind) {
    switch (kind) {
        case GouSamplerKind::JumpTime: return "jumptime";
        case GouSamplerKind::PolyaMixture: return "polya";
        case GouSamplerKind::RandomRate: return "randomrate";
        case GouSamplerKind::EulerBiased: return "euler";
    }
    return "unknown";
}

GouSamplerKind sampler_kind_from_string(std::string_view name) {
    if (name == "jumptime") return GouSamplerKind::JumpTime;
    if (name == "polya") return GouSamplerKind::PolyaMixture;
    if (name == "randomrate") return GouSamplerKind::RandomRate;
    if (name == "euler") return GouSamplerKind::EulerBiased;
    throw ConfigError("unknown sampler kind '" + std::string(name) +
                      "' (expected jumptime|polya|randomrate|euler)");
}

void StepwiseIntensity::validate() const {
    if (grid.size() < 2 || values.size() + 1 != grid.size()) {
        throw DomainError("stepwise intensity: need M+1 grid points and M values");
    }
    for (std::size_t m = 1; m < grid.size(); ++m) {
        if (!(grid[m] > grid[m - 1])) {
            throw DomainError("stepwise intensity: grid must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!(v >= 0.0)) throw DomainError("stepwise intensity: values must be >= 0");
    }
}

double StepwiseIntensity::integral() const {
    double acc = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m) {
        acc += values[m] * (grid[m + 1] - grid[m]);
    }
    return acc;
}

double seasonal_intensity(double theta, double omega, double tau, double t) {
    return 2.0 * theta / (1.0 + std::abs(std::sin(M_PI * omega * (t - tau))));
}

StepwiseIntensity intensity_on_grid(double theta, double omega, double tau,
                                    const std::vector<double>& grid) {
    if (!(theta > 0.0) || !(omega > 0.0)) {
        throw DomainError("seasonal intensity: theta and omega must be positive");
    }
    StepwiseIntensity out;
    out.grid = grid;
    out.values.reserve(grid.size() > 0 ? grid.size() - 1 : 0);
    for (std::size_t m = 0; m + 1 < grid.size(); ++m) {
        out.values.push_back(seasonal_intensity(theta, omega, tau, grid[m]));
    }
    out.validate();
    return out;
}

double gaussian_ou_step(const GaussianOuParams& params, double x_prev, double dt,
                        RngStream& rng) {
    require_positive_dt(dt);
    const double decay = std::exp(-params.k_d * dt);
    if (params.sigma == 0.0) return x_prev * decay;
    const double sd =
        params.sigma * std::sqrt((1.0 - decay * decay) / (2.0 * params.k_d));
    return x_prev * decay + sd * rng.normal();
}

std::complex<double> gou_chf(std::complex<double> u, double t, const GouParams& params) {
    const double a = std::exp(-params.k * t);
    const std::complex<double> phase = std::exp(kI * u * (params.y0 * a));
    if (params.lambda == 0.0) return phase;
    const std::complex<double> ratio =
        (params.beta - kI * u * a) / (params.beta - kI * u);
    return phase * std::pow(ratio, params.lambda / params.k);
}

std::complex<double> sym_bgou_chf(std::complex<double> u, double t,
                                  const SymBgouParams& params) {
    const double a = std::exp(-params.k * t);
    const std::complex<double> phase = std::exp(kI * u * (params.y0 * a));
    if (params.lambda == 0.0) return phase;
    const double b2 = params.beta * params.beta;
    const std::complex<double> u2 = u * u;
    const std::complex<double> ratio = (b2 + u2 * (a * a)) / (b2 + u2);
    return phase * std::pow(ratio, params.lambda / (2.0 * params.k));
}

std::complex<double> gou_chf_stepwise(std::complex<double> u, double t, double k,
                                      double beta, const StepwiseIntensity& intensity,
                                      double y0) {
    intensity.validate();
    std::complex<double> log_phi = kI * u * (y0 * std::exp(-k * t));
    for (std::size_t m = 0; m < intensity.values.size(); ++m) {
        const double s_lo = intensity.grid[m];
        if (s_lo >= t) break;
        const double s_hi = std::min(intensity.grid[m + 1], t);
        const double d_lo = std::exp(-k * (t - s_lo));
        const double d_hi = std::exp(-k * (t - s_hi));
        log_phi += (intensity.values[m] / k) *
                   std::log((beta - kI * u * d_lo) / (beta - kI * u * d_hi));
    }
    return std::exp(log_phi);
}

std::complex<double> sym_bgou_chf_stepwise(std::complex<double> u, double t, double k,
                                           double beta, const StepwiseIntensity& intensity,
                                           double y0) {
    intensity.validate();
    const double b2 = beta * beta;
    const std::complex<double> u2 = u * u;
    std::complex<double> log_phi = kI * u * (y0 * std::exp(-k * t));
    for (std::size_t m = 0; m < intensity.values.size(); ++m) {
        const double s_lo = intensity.grid[m];
        if (s_lo >= t) break;
        const double s_hi = std::min(intensity.grid[m + 1], t);
        const double d_lo = std::exp(-k * (t - s_lo));
        const double d_hi = std::exp(-k * (t - s_hi));
        log_phi += (intensity.values[m] / (2.0 * k)) *
                   std::log((b2 + u2 * (d_lo * d_lo)) / (b2 + u2 * (d_hi * d_hi)));
    }
    return std::exp(log_phi);
}

double sample_gou_jumptime(const GouParams& params, double dt, RngStream& rng,
                           bool sort_jump_times) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    const long long n = variates::sample_poisson(params.lambda * dt, rng);
    if (n == 0) return 0.0;
    double y = 0.0;
    if (sort_jump_times) {
        std::vector<double> taus(static_cast<std::size_t>(n));
        for (auto& tau : taus) tau = dt * rng.uniform();
        std::sort(taus.begin(), taus.end());
        for (double tau : taus) {
            y += std::exp(-params.k * (dt - tau)) * rng.exponential(params.beta);
        }
    } else {
        for (long long i = 0; i < n; ++i) {
            const double tau = dt * rng.uniform();
            y += std::exp(-params.k * (dt - tau)) * rng.exponential(params.beta);
        }
    }
    return y;
}

double sample_gou_polya(const GouParams& params, double dt, RngStream& rng) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    // Zero-class mass of pol(lambda/k, 1-a) is a^{lambda/k} = e^{-lambda dt}.
    const double p0 = std::exp(-params.lambda * dt);
    const double u = rng.uniform();
    if (u <= p0) return 0.0;
    const double alpha = params.lambda / params.k;
    const double a = std::exp(-params.k * dt);
    const long long b = polya_index_by_inversion(u, p0, alpha, 1.0 - a, rng);
    if (b == 0) return 0.0;
    return variates::sample_erlang(b, params.beta / a, rng);
}

double sample_gou_randomrate(const GouParams& params, double dt, RngStream& rng) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    const long long n = variates::sample_poisson(params.lambda * dt, rng);
    double y = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double rate = params.beta * std::exp(params.k * dt * rng.uniform());
        y += rng.exponential(rate);
    }
    return y;
}

double sample_gou_euler(const GouParams& params, double y_prev, double dt,
                        RngStream& rng) {
    require_positive_dt(dt);
    if (params.lambda * dt >= 1.0) {
        throw DomainError("euler step: lambda*dt must be < 1, got " +
                          std::to_string(params.lambda * dt));
    }
    double y = y_prev * (1.0 - params.k * dt);
    if (rng.uniform() < params.lambda * dt) y += rng.exponential(params.beta);
    return y;
}

double sample_sym_bgou_jumptime(const SymBgouParams& params, double dt, RngStream& rng,
                                bool sort_jump_times) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    const long long n = variates::sample_poisson(params.lambda * dt, rng);
    if (n == 0) return 0.0;
    double y = 0.0;
    if (sort_jump_times) {
        std::vector<double> taus(static_cast<std::size_t>(n));
        for (auto& tau : taus) tau = dt * rng.uniform();
        std::sort(taus.begin(), taus.end());
        for (double tau : taus) {
            const double jump = rng.exponential(params.beta) - rng.exponential(params.beta);
            y += std::exp(-params.k * (dt - tau)) * jump;
        }
    } else {
        for (long long i = 0; i < n; ++i) {
            const double tau = dt * rng.uniform();
            const double jump = rng.exponential(params.beta) - rng.exponential(params.beta);
            y += std::exp(-params.k * (dt - tau)) * jump;
        }
    }
    return y;
}

double sample_sym_bgou_polya(const SymBgouParams& params, double dt, RngStream& rng) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    // Index is pol(lambda/2k, 1-a^2); its zero-class mass is again e^{-lambda dt}.
    const double p0 = std::exp(-params.lambda * dt);
    const double u = rng.uniform();
    if (u <= p0) return 0.0;
    const double alpha = params.lambda / (2.0 * params.k);
    const double a = std::exp(-params.k * dt);
    const long long b = polya_index_by_inversion(u, p0, alpha, 1.0 - a * a, rng);
    if (b == 0) return 0.0;
    const double rate = params.beta / a;
    return variates::sample_erlang(b, rate, rng) - variates::sample_erlang(b, rate, rng);
}

double sample_sym_bgou_randomrate(const SymBgouParams& params, double dt, RngStream& rng,
                                  bool independent_leg_rates) {
    require_positive_dt(dt);
    if (params.lambda == 0.0) return 0.0;
    const long long n = variates::sample_poisson(params.lambda * dt, rng);
    double y = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double v_up = rng.uniform();
        const double v_down = independent_leg_rates ? rng.uniform() : v_up;
        const double rate_up = params.beta * std::exp(params.k * dt * v_up);
        const double rate_down = params.beta * std::exp(params.k * dt * v_down);
        y += rng.exponential(rate_up) - rng.exponential(rate_down);
    }
    return y;
}

double gou_step(GouSamplerKind kind, const GouParams& params, double y_prev, double dt,
                RngStream& rng, bool sort_jump_times) {
    if (kind == GouSamplerKind::EulerBiased) {
        return sample_gou_euler(params, y_prev, dt, rng);
    }
    const double decayed = y_prev * std::exp(-params.k * dt);
    switch (kind) {
        case GouSamplerKind::JumpTime:
            return decayed + sample_gou_jumptime(params, dt, rng, sort_jump_times);
        case GouSamplerKind::PolyaMixture:
            return decayed + sample_gou_polya(params, dt, rng);
        case GouSamplerKind::RandomRate:
            return decayed + sample_gou_randomrate(params, dt, rng);
        default:
            break;
    }
    throw DomainError("gou_step: unsupported sampler kind");
}

double sym_bgou_step(GouSamplerKind kind, const SymBgouParams& params, double y_prev,
                     double dt, RngStream& rng, bool sort_jump_times) {
    if (kind == GouSamplerKind::EulerBiased) {
        // Demonstration-only analogue of the exponential-leg Euler update.
        if (params.lambda * dt >= 1.0) {
            throw DomainError("euler step: lambda*dt must be < 1");
        }
        double y = y_prev * (1.0 - params.k * dt);
        if (rng.uniform() < params.lambda * dt) {
            y += rng.exponential(params.beta) - rng.exponential(params.beta);
        }
        return y;
    }
    const double decayed = y_prev * std::exp(-params.k * dt);
    switch (kind) {
        case GouSamplerKind::JumpTime:
            return decayed + sample_sym_bgou_jumptime(params, dt, rng, sort_jump_times);
        case GouSamplerKind::PolyaMixture:
            return decayed + sample_sym_bgou_polya(params, dt, rng);
        case GouSamplerKind::RandomRate:
            return decayed + sample_sym_bgou_randomrate(params, dt, rng);
        default:
            break;
    }
    throw DomainError("sym_bgou_step: unsupported sampler kind");
}

}  // namespace spotsim::ou
