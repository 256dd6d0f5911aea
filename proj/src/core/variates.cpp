#include "variates.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace spotsim::variates {

namespace {

long long sample_poisson_inversion(double mean, RngStream& rng) {
    // Knuth's product-of-uniforms search; exact for small means.
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
        ++k;
        prod *= rng.uniform();
    }
    return k;
}

long long sample_poisson_ptrs(double mean, RngStream& rng) {
    // Hormann (1993), transformed rejection with squeeze; exact for mean >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0)) {
            return static_cast<long long>(kf);
        }
    }
}

}  // namespace

void PolyaParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("polya: alpha must be positive, got " + std::to_string(alpha));
    }
    if (!(p >= 0.0) || !(p < 1.0)) {
        throw DomainError("polya: p must lie in [0, 1), got " + std::to_string(p));
    }
}

long long sample_poisson(double mean, RngStream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("poisson: mean must be non-negative, got " + std::to_string(mean));
    }
    if (mean == 0.0) return 0;
    if (mean < 10.0) return sample_poisson_inversion(mean, rng);
    return sample_poisson_ptrs(mean, rng);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw DomainError("gamma: shape and rate must be positive, got shape=" +
                          std::to_string(shape) + " rate=" + std::to_string(rate));
    }
    if (shape < 1.0) {
        // G(shape) = G(shape + 1) * U^{1/shape}, exact.
        const double u = rng.uniform_pos();
        return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang rejection with squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_erlang(long long shape, double rate, RngStream& rng) {
    if (shape < 1) {
        throw DomainError("erlang: shape must be >= 1, got " + std::to_string(shape));
    }
    if (!(rate > 0.0)) {
        throw DomainError("erlang: rate must be positive, got " + std::to_string(rate));
    }
    if (shape <= 16) {
        double prod = 1.0;
        for (long long i = 0; i < shape; ++i) prod *= rng.uniform_pos();
        return -std::log(prod) / rate;
    }
    // Same law, O(1) uniforms for large orders.
    return sample_gamma(static_cast<double>(shape), rate, rng);
}

long long sample_polya(const PolyaParams& params, RngStream& rng) {
    params.validate();
    if (params.p == 0.0) return 0;
    const double g = sample_gamma(params.alpha, (1.0 - params.p) / params.p, rng);
    return sample_poisson(g, rng);
}

bool sample_bernoulli(double p, RngStream& rng) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
        throw DomainError("bernoulli: p must lie in [0, 1], got " + std::to_string(p));
    }
    return rng.uniform() < p;
}

}  // namespace spotsim::variates
