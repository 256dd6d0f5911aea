#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spotsim::stats {

MeanVar mean_var(std::span<const double> xs) {
    MeanVar out;
    out.n = xs.size();
    if (out.n == 0) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n < 2) return out;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    out.var = ss / static_cast<double>(out.n - 1);
    out.se_mean = std::sqrt(out.var / static_cast<double>(out.n));
    return out;
}

std::complex<double> empirical_chf(std::span<const double> xs, double u) {
    double re = 0.0, im = 0.0;
    for (double x : xs) {
        re += std::cos(u * x);
        im += std::sin(u * x);
    }
    const double n = static_cast<double>(xs.size());
    return {re / n, im / n};
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

namespace {

double ks_coefficient(double significance) {
    // c(alpha) = sqrt(-ln(alpha/2) / 2); c(0.01) ~ 1.6276
    return std::sqrt(-std::log(significance / 2.0) / 2.0);
}

}  // namespace

double ks_critical_two_sample(double significance, std::size_t n, std::size_t m) {
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return ks_coefficient(significance) * std::sqrt((nn + mm) / (nn * mm));
}

double ks_critical_one_sample(double significance, std::size_t n) {
    return ks_coefficient(significance) / std::sqrt(static_cast<double>(n));
}

double chi_square_stat(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size()) {
        throw std::invalid_argument("chi_square_stat: size mismatch");
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

double chi_square_critical_99(int df) {
    static const double table[] = {
        // df = 1..30
        6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666,
        23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000, 33.409, 34.805,
        36.191, 37.566, 38.932, 40.289, 41.638, 42.980, 44.314, 45.642, 46.963,
        48.278, 49.588, 50.892};
    if (df >= 1 && df <= 30) return table[df - 1];
    // Wilson-Hilferty approximation with z_{0.99} = 2.3263
    const double z = 2.3263478740408408;
    const double f = static_cast<double>(df);
    const double t = 1.0 - 2.0 / (9.0 * f) + z * std::sqrt(2.0 / (9.0 * f));
    return f * t * t * t;
}

}  // namespace spotsim::stats
