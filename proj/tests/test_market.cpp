#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/market.hpp"
#include "core/stats.hpp"
#include "oracles.hpp"

using namespace spotsim;
using market::Case1Jumps;
using market::Case2Jumps;
using market::Case3Jumps;
using market::MarketModel;
using market::TimeGrid;

namespace {

MarketModel case1_model() {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    m.jumps = Case1Jumps{50.0, 20.0, 0.5, 10.0, 20.0};
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

MarketModel case2_model() {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    m.jumps = Case2Jumps{50.0, 40.0, 20.0, 20.0, 10.0, 20.0};
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

MarketModel case3_model(bool seasonal) {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    Case3Jumps c3{50.0, 20.0, 40.0, std::nullopt};
    if (seasonal) c3.seasonal = market::SeasonalIntensitySpec{32.0, 2.0, 0.25};
    m.jumps = c3;
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

std::vector<double> terminal_spots(const MarketModel& m, std::size_t n,
                                   std::uint64_t seed) {
    const auto grid = TimeGrid::daily(1.0);
    std::vector<double> out(n);
    market::for_each_path(m, grid, {n, seed, 0, false},
                          [&](std::size_t p, std::span<const double> spot) {
                              out[p] = spot.back();
                          });
    return out;
}

}  // namespace

TEST_CASE("forward curve: flat and tabulated step interpolation") {
    const auto flat = market::ForwardCurve::flat(22.0);
    CHECK(flat(0.0) == 22.0);
    CHECK(flat(0.9) == 22.0);
    CHECK_THROWS_AS(market::ForwardCurve::flat(-3.0), DomainError);

    const auto steps = market::ForwardCurve::tabulated({0.0, 0.5, 0.75}, {20.0, 25.0, 30.0});
    CHECK(steps(0.0) == 20.0);
    CHECK(steps(0.49) == 20.0);
    CHECK(steps(0.5) == 25.0);
    CHECK(steps(0.74) == 25.0);
    CHECK(steps(2.0) == 30.0);
    CHECK_THROWS_AS(market::ForwardCurve::tabulated({0.5, 0.5}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(market::ForwardCurve::tabulated({0.0, 0.5}, {1.0, -2.0}), DomainError);
}

TEST_CASE("time grid construction") {
    const auto g = TimeGrid::daily(1.0);
    CHECK(g.steps() == 365);
    CHECK(g.t.front() == 0.0);
    CHECK(g.horizon() == doctest::Approx(1.0));
    CHECK(g.dt(1) == doctest::Approx(1.0 / 365.0));
    CHECK_THROWS_AS(TimeGrid::daily(-1.0), DomainError);

    const auto q = TimeGrid::daily(0.5, 365);
    CHECK(q.steps() == 183);  // rounded to the nearest day count
}

TEST_CASE("model validation rejects out-of-domain parameters") {
    auto m = case1_model();
    std::get<Case1Jumps>(m.jumps).beta1 = 0.5;
    CHECK_THROWS_AS(m.validate(), DomainError);

    auto e = case1_model();
    e.sampler = ou::GouSamplerKind::EulerBiased;
    CHECK_THROWS_AS(e.validate(), ConfigError);
    e.allow_biased = true;
    CHECK_NOTHROW(e.validate());

    auto s = case1_model();
    s.case1_route = market::Case1Route::SingleKou;
    s.sampler = ou::GouSamplerKind::PolyaMixture;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.sampler = ou::GouSamplerKind::JumpTime;
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("drift: zero at t=0 and the diffusion-only closed form") {
    auto m = case1_model();
    CHECK(market::drift_h_generic(m, 0.0) == 0.0);
    CHECK(market::drift_h_closed(m, 0.0) == 0.0);

    std::get<Case1Jumps>(m.jumps).lambda = 0.0;
    for (double t : {0.2, 1.0}) {
        const double kd = m.diffusion.k_d, sg = m.diffusion.sigma;
        const double expected = -sg * sg / (4.0 * kd) * (1.0 - std::exp(-2.0 * kd * t));
        CHECK(market::drift_h_generic(m, t) == doctest::Approx(expected).epsilon(1e-13));
        CHECK(market::drift_h_closed(m, t) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("closed-form drift agrees with the chf-product evaluation to 1e-12") {
    const MarketModel models[] = {case1_model(), case2_model(), case3_model(false),
                                  case3_model(true)};
    for (const auto& m : models) {
        for (double t : {0.1, 0.5, 1.0}) {
            const double c = market::drift_h_closed(m, t);
            const double g = market::drift_h_generic(m, t);
            INFO("case=", m.jump_case(), " t=", t);
            CHECK(std::abs(c - g) <= 1e-12 * std::max(1.0, std::abs(c)));
        }
    }
    // nonzero initial factor levels shift the drift through the phase terms
    auto m = case2_model();
    m.diffusion.x0 = 0.3;
    m.y1_0 = 0.2;
    m.y2_0 = 0.1;
    for (double t : {0.1, 1.0}) {
        CHECK(std::abs(market::drift_h_closed(m, t) - market::drift_h_generic(m, t)) <=
              1e-12);
    }
}

TEST_CASE("deterministic degenerate model produces constant paths at the forward level") {
    MarketModel m = case1_model();
    m.diffusion.sigma = 0.0;
    std::get<Case1Jumps>(m.jumps).lambda = 0.0;
    const auto grid = TimeGrid::daily(1.0);
    const auto batch = market::simulate_paths(m, grid, {16, 7, 0, true});
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        for (std::size_t i = 0; i < grid.t.size(); ++i) {
            CHECK(batch.at(p, i) == doctest::Approx(22.0).epsilon(1e-12));
        }
    }
    // spot column 0 equals F(0,0) e^{x0 + y1 - y2}
    MarketModel shifted = m;
    shifted.diffusion.x0 = 0.1;
    shifted.y1_0 = 0.05;
    shifted.y2_0 = 0.02;
    const auto b2 = market::simulate_paths(shifted, grid, {4, 7, 0, false});
    CHECK(b2.at(0, 0) == doctest::Approx(22.0 * std::exp(0.1 + 0.05 - 0.02)));
}

TEST_CASE("martingale: mean of S(t)/F(0,t) is 1 within 5 SE per preset") {
    const std::size_t n = 200000;
    const MarketModel models[] = {case1_model(), case2_model(), case3_model(true)};
    std::uint64_t seed = 500;
    for (const auto& m : models) {
        const auto spots = terminal_spots(m, n, seed++);
        std::vector<double> ratio(spots.size());
        for (std::size_t i = 0; i < spots.size(); ++i) ratio[i] = spots[i] / 22.0;
        const auto mv = stats::mean_var(ratio);
        INFO("case=", m.jump_case(), " dev=", std::abs(mv.mean - 1.0) / mv.se_mean, " SE");
        CHECK(std::abs(mv.mean - 1.0) < 5.0 * mv.se_mean);
    }
}

TEST_CASE("jump factor decays at the mean-reversion rate (lag-1 autocorrelation)") {
    MarketModel m = case1_model();
    m.sampler = ou::GouSamplerKind::PolyaMixture;
    const auto grid = TimeGrid::daily(1.0);
    const auto batch = market::simulate_paths(m, grid, {400, 11, 0, true});
    // pooled lag-1 autocorrelation of the upward jump factor over the
    // stationary tail of the year
    double sum = 0.0, count = 0.0;
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        for (std::size_t i = 182; i < 365; ++i) {
            sum += batch.factor_y1[p * 366 + i];
            count += 1.0;
        }
    }
    const double mean = sum / count;
    double cov = 0.0, var = 0.0;
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        for (std::size_t i = 182; i < 365; ++i) {
            const double a = batch.factor_y1[p * 366 + i] - mean;
            const double b = batch.factor_y1[p * 366 + i + 1] - mean;
            cov += a * b;
            var += a * a;
        }
    }
    const double rho = cov / var;
    const double expected = std::exp(-50.0 / 365.0);
    CHECK(std::abs(rho - expected) < 0.05);
}

TEST_CASE("case 1: single-compound route and the two-leg decomposition agree in law") {
    MarketModel two_leg = case1_model();
    two_leg.sampler = ou::GouSamplerKind::JumpTime;
    MarketModel single = two_leg;
    single.case1_route = market::Case1Route::SingleKou;

    const std::size_t n = 100000;
    const auto a = terminal_spots(two_leg, n, 21);
    const auto b = terminal_spots(single, n, 22);
    const double d = stats::ks_two_sample(a, b);
    CHECK(d < stats::ks_critical_two_sample(0.01, n, n));
}

TEST_CASE("case 3: combined symmetric sampler and the two-leg route agree in law") {
    MarketModel combined = case3_model(true);
    MarketModel legs = combined;
    legs.case3_route = market::Case3Route::TwoLeg;
    const std::size_t n = 100000;
    const auto a = terminal_spots(combined, n, 31);
    const auto b = terminal_spots(legs, n, 32);
    const double d = stats::ks_two_sample(a, b);
    CHECK(d < stats::ks_critical_two_sample(0.01, n, n));
}

TEST_CASE("simulation is bit-identical across runs and worker counts") {
    const auto m = case2_model();
    const auto grid = TimeGrid::daily(0.5);
    const auto one = market::simulate_paths(m, grid, {64, 99, 1, false});
    const auto two = market::simulate_paths(m, grid, {64, 99, 2, false});
    const auto re = market::simulate_paths(m, grid, {64, 99, 2, false});
    REQUIRE(one.spot.size() == two.spot.size());
    for (std::size_t i = 0; i < one.spot.size(); ++i) {
        REQUIRE(one.spot[i] == two.spot[i]);
        REQUIRE(one.spot[i] == re.spot[i]);
    }

    // streaming and materialized engines agree path by path
    std::vector<double> streamed(64);
    market::for_each_path(m, grid, {64, 99, 2, false},
                          [&](std::size_t p, std::span<const double> spot) {
                              streamed[p] = spot.back();
                          });
    for (std::size_t p = 0; p < 64; ++p) CHECK(streamed[p] == one.row(p).back());
}

TEST_CASE("per-sampler terminal spot distributions are KS-indistinguishable") {
    MarketModel m = case2_model();
    const std::size_t n = 100000;
    m.sampler = ou::GouSamplerKind::JumpTime;
    const auto a = terminal_spots(m, n, 41);
    m.sampler = ou::GouSamplerKind::PolyaMixture;
    const auto b = terminal_spots(m, n, 42);
    m.sampler = ou::GouSamplerKind::RandomRate;
    const auto c = terminal_spots(m, n, 43);
    CHECK(stats::ks_two_sample(a, b) < stats::ks_critical_two_sample(0.01, n, n));
    CHECK(stats::ks_two_sample(a, c) < stats::ks_critical_two_sample(0.01, n, n));
    CHECK(stats::ks_two_sample(b, c) < stats::ks_critical_two_sample(0.01, n, n));
}

TEST_CASE("all spot entries stay positive with spiky parameters") {
    MarketModel m = case3_model(true);
    const auto grid = TimeGrid::daily(1.0);
    const auto batch = market::simulate_paths(m, grid, {2000, 77, 0, false});
    double min_spot = batch.spot[0];
    for (double s : batch.spot) min_spot = std::min(min_spot, s);
    CHECK(min_spot > 0.0);
}
