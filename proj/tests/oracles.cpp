#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 2000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    // Lentz's algorithm for the upper incomplete gamma continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 2000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double gamma_cdf(double shape, double rate, double x) {
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(shape, rate * x);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0 || n < 2) throw std::invalid_argument("simpson: n must be even");
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

double polya_pmf(double alpha, double p, long long k) {
    if (k < 0) return 0.0;
    const double kk = static_cast<double>(k);
    const double log_binom =
        std::lgamma(alpha + kk) - std::lgamma(kk + 1.0) - std::lgamma(alpha);
    return std::exp(log_binom + alpha * std::log1p(-p) + kk * std::log(p));
}

double polya_mean_by_series(double alpha, double p) {
    if (p == 0.0) return 0.0;
    double mean = 0.0;
    double tail = 1.0;
    for (long long k = 0; k < 1000000 && tail > 1e-14; ++k) {
        const double pmf = polya_pmf(alpha, p, k);
        mean += static_cast<double>(k) * pmf;
        tail -= pmf;
    }
    return mean;
}

Moments moments_from_chf(const std::function<std::complex<double>(double)>& chf, double h) {
    const auto plus = chf(h);
    const auto minus = chf(-h);
    const double mean = (plus.imag() - minus.imag()) / (2.0 * h);
    const double second = -((plus.real() - 2.0 + minus.real()) / (h * h));
    return {mean, second - mean * mean};
}

}  // namespace oracles
