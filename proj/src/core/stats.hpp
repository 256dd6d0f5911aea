#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spotsim::stats {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;      // unbiased sample variance
    double se_mean = 0.0;  // sqrt(var / n)
    std::size_t n = 0;
};

MeanVar mean_var(std::span<const double> xs);

/// (1/n) sum e^{i u x_j}
std::complex<double> empirical_chf(std::span<const double> xs, double u);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2| (inputs copied, sorted).
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS statistic against a CDF (input copied, sorted).
double ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

/// Asymptotic KS critical values: reject when statistic exceeds these.
double ks_critical_two_sample(double significance, std::size_t n, std::size_t m);
double ks_critical_one_sample(double significance, std::size_t n);

/// Pearson chi-square statistic for observed counts vs expected counts.
double chi_square_stat(std::span<const double> observed, std::span<const double> expected);

/// 99th percentile of chi-square with df degrees of freedom (table for small df,
/// Wilson-Hilferty beyond it).
double chi_square_critical_99(int df);

}  // namespace spotsim::stats
