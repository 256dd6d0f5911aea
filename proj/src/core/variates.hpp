#pragma once

#include <cstdint>

#include "rng.hpp"

namespace spotsim::variates {

/// Polya (negative binomial) parameters: P{S=k} = C(alpha+k-1, k) (1-p)^alpha p^k.
struct PolyaParams {
    double alpha = 1.0;  // shape, > 0, not restricted to integers
    double p = 0.5;      // success probability, in [0, 1)

    void validate() const;
};

/// Exact Poisson variate. Sequential inversion below mean 10, Hormann's PTRS
/// transformed rejection above. mean == 0 returns 0.
long long sample_poisson(double mean, RngStream& rng);

/// Exact gamma variate with real shape > 0 and rate > 0. Marsaglia-Tsang for
/// shape >= 1, with the shape-boost power trick below 1; no discretization.
double sample_gamma(double shape, double rate, RngStream& rng);

/// Sum of `shape` independent exponentials of the given rate. shape >= 1;
/// callers treat shape 0 as the deterministic value 0 themselves.
double sample_erlang(long long shape, double rate, RngStream& rng);

/// Polya variate through the gamma-Poisson mixture: S | G ~ Poisson(G) with
/// G ~ gamma(alpha, (1-p)/p). Valid for any real alpha > 0.
long long sample_polya(const PolyaParams& params, RngStream& rng);

bool sample_bernoulli(double p, RngStream& rng);

}  // namespace spotsim::variates
