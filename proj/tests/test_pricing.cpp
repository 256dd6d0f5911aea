#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "core/errors.hpp"
#include "core/market.hpp"
#include "core/pricing.hpp"

using namespace spotsim;
using market::MarketModel;
using pricing::AsianSpec;
using pricing::LsmcConfig;
using pricing::StorageSpec;
using pricing::SwingSpec;

namespace {

MarketModel deterministic_model(double s0 = 22.0) {
    MarketModel m;
    m.diffusion = {67.0, 0.0, 0.0};
    m.jumps = market::Case1Jumps{50.0, 0.0, 0.5, 10.0, 20.0};
    m.forward = market::ForwardCurve::flat(s0);
    return m;
}

MarketModel case1_model() {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    m.jumps = market::Case1Jumps{50.0, 20.0, 0.5, 10.0, 20.0};
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

MarketModel case2_model() {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    m.jumps = market::Case2Jumps{50.0, 40.0, 20.0, 20.0, 10.0, 20.0};
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

MarketModel case3_model() {
    MarketModel m;
    m.diffusion = {67.0, 0.25, 0.0};
    market::Case3Jumps c3{50.0, 20.0, 40.0, market::SeasonalIntensitySpec{32.0, 2.0, 0.25}};
    m.jumps = c3;
    m.forward = market::ForwardCurve::flat(22.0);
    return m;
}

// Exact dynamic program on a two-branch scenario tree (three decision dates,
// common S at t1, branch-specific S afterwards). Independent oracle for the
// LSMC induction.
struct ToyTree {
    double s1 = 10.0;
    double s2[2] = {12.0, 8.0};
    double s3[2] = {14.0, 6.0};
    StorageSpec spec;

    double cash(int regime, double s) const {
        if (regime == 0) return -s - spec.k_in * spec.a_in;   // inject
        if (regime == 1) return -spec.k_n;                    // idle
        return s - spec.k_out * spec.a_w;                     // withdraw
    }

    // volumes live on an integer grid 0..levels
    double value_by_enumeration(int levels, int start, int target) const {
        const double neg_inf = -std::numeric_limits<double>::infinity();
        // regimes move the volume by a full step or are inadmissible
        const auto admissible = [&](int c, int regime) {
            return regime == 1 || (regime == 0 ? c + 1 <= levels : c - 1 >= 0);
        };
        const auto transition = [&](int c, int regime) {
            return regime == 0 ? c + 1 : (regime == 1 ? c : c - 1);
        };
        // after the third decision the volume must sit on the target
        const auto v_after = [&](int c) { return c == target ? 0.0 : neg_inf; };
        double v3[2][8], v2[2][8];
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c <= levels; ++c) {
                double best = neg_inf;
                for (int r = 0; r < 3; ++r) {
                    if (!admissible(c, r)) continue;
                    best = std::max(best, cash(r, s3[b]) + v_after(transition(c, r)));
                }
                v3[b][c] = best;
            }
        }
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c <= levels; ++c) {
                double best = neg_inf;
                for (int r = 0; r < 3; ++r) {
                    if (!admissible(c, r)) continue;
                    best = std::max(best, cash(r, s2[b]) + v3[b][transition(c, r)]);
                }
                v2[b][c] = best;
            }
        }
        double best = neg_inf;
        for (int r = 0; r < 3; ++r) {
            if (!admissible(start, r)) continue;
            const int c = transition(start, r);
            best = std::max(best, cash(r, s1) + 0.5 * (v2[0][c] + v2[1][c]));
        }
        return best;
    }

    market::PathBatch as_paths(std::size_t copies_per_branch) const {
        market::PathBatch batch;
        batch.grid.t = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
        batch.n_paths = 2 * copies_per_branch;
        batch.spot.resize(batch.n_paths * 4);
        for (std::size_t p = 0; p < batch.n_paths; ++p) {
            const int b = p % 2;
            double* row = batch.spot.data() + p * 4;
            row[0] = s1;
            row[1] = s1;
            row[2] = s2[b];
            row[3] = s3[b];
        }
        return batch;
    }
};

}  // namespace

TEST_CASE("asian: deterministic flat model prices at intrinsic") {
    const auto m = deterministic_model();
    AsianSpec atm{22.0, 1.0, {}};
    const auto r = pricing::price_asian(m, atm, {256, 5, 0, false});
    CHECK(r.price == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.rmse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.contract == "asian");
    CHECK(r.n_paths == 256);
}

TEST_CASE("asian: zero strike recovers the average forward within 5 RMSE") {
    const auto m = case1_model();
    AsianSpec zero{0.0, 1.0, {}};
    const auto r = pricing::price_asian(m, zero, {100000, 11, 0, false});
    CHECK(std::abs(r.price - 22.0) < 5.0 * r.rmse);
}

TEST_CASE("asian: the three exact samplers agree pairwise within 3 combined RMSE") {
    AsianSpec atm{22.0, 1.0, {}};
    std::vector<pricing::ValuationReport> reports;
    std::uint64_t seed = 100;
    for (const auto kind :
         {ou::GouSamplerKind::JumpTime, ou::GouSamplerKind::PolyaMixture,
          ou::GouSamplerKind::RandomRate}) {
        auto m = case1_model();
        m.sampler = kind;
        reports.push_back(pricing::price_asian(m, atm, {50000, seed++, 0, false}));
        CHECK(reports.back().price > 0.0);
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            const double combined = std::hypot(reports[i].rmse, reports[j].rmse);
            INFO(reports[i].sampler, " vs ", reports[j].sampler);
            CHECK(std::abs(reports[i].price - reports[j].price) <= 3.0 * combined);
        }
    }
}

TEST_CASE("asian price ladder is non-increasing and convex in the strike") {
    const auto m = case1_model();
    const double strikes[] = {16.0, 19.0, 22.0, 25.0, 28.0};
    std::vector<double> prices;
    for (double k : strikes) {
        // same seed = common random numbers across the ladder
        prices.push_back(
            pricing::price_asian(m, {k, 1.0, {}}, {20000, 77, 0, false}).price);
    }
    for (std::size_t i = 1; i < prices.size(); ++i) {
        CHECK(prices[i] <= prices[i - 1] + 1e-10);
    }
    for (std::size_t i = 1; i + 1 < prices.size(); ++i) {
        CHECK(prices[i + 1] + prices[i - 1] >= 2.0 * prices[i] - 1e-10);
    }
}

TEST_CASE("lsmc: flat deterministic price with zero costs has zero storage value") {
    auto m = deterministic_model();
    StorageSpec spec;
    spec.k_in = spec.k_out = spec.k_n = 0.0;
    const auto r = pricing::lsmc_value(m, spec, {5.0, 3}, {128, 3, 0, false});
    CHECK(r.price == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("lsmc rejects volume grids that do not divide the rates") {
    StorageSpec spec;
    spec.a_in = 3.0;  // volume_step 5 does not divide 3
    CHECK_THROWS_AS(spec.validate(5.0), DomainError);
    StorageSpec ok;
    CHECK_NOTHROW(ok.validate(5.0));
}

TEST_CASE("lsmc flags unreachable terminal targets") {
    auto m = deterministic_model();
    StorageSpec spec;
    spec.c_start = 0.0;
    spec.c_end_target = 100.0;
    spec.horizon_years = 10.0 / 365.0;  // at a_in = 5 only 50 MWh can be injected
    CHECK_THROWS_AS(pricing::lsmc_value(m, spec, {5.0, 3}, {128, 3, 0, false}),
                    FeasibilityError);
}

TEST_CASE("lsmc enforces a minimum path count per basis function") {
    auto m = deterministic_model();
    StorageSpec spec;
    CHECK_THROWS_AS(pricing::lsmc_value(m, spec, {5.0, 3}, {16, 3, 0, false}),
                    DomainError);
}

TEST_CASE("deterministic swing values: forced strip and in/at-the-money exactness") {
    const auto m = deterministic_model();  // flat 22
    // 120 rights over a year, strike 20: every right pays 2
    const auto itm = pricing::price_swing(m, {20.0, 1.0, 120.0, 1.0}, {1.0, 3},
                                          {128, 9, 0, false});
    CHECK(itm.price == doctest::Approx(120.0 * 2.0).epsilon(1e-10));
    CHECK(itm.contract == "swing");

    const auto atm = pricing::price_swing(m, {22.0, 1.0, 120.0, 1.0}, {1.0, 3},
                                          {128, 9, 0, false});
    CHECK(atm.price == doctest::Approx(0.0).epsilon(1e-10));

    // rights equal to the horizon day count force daily exercise: a strip of
    // forwards (exact, deterministic model)
    const double horizon = 20.0 / 365.0;
    const auto strip = pricing::price_swing(m, {20.0, 1.0, 20.0, horizon}, {1.0, 3},
                                            {128, 9, 0, false});
    CHECK(strip.price == doctest::Approx(20.0 * 2.0).epsilon(1e-10));
}

TEST_CASE("lsmc matches the exhaustive scenario-tree dynamic program (toy instance)") {
    ToyTree toy;
    toy.spec.c_min = 0.0;
    toy.spec.c_max = 2.0;
    toy.spec.c_start = 1.0;
    toy.spec.c_end_target = 1.0;
    toy.spec.a_in = 1.0;
    toy.spec.a_w = 1.0;
    toy.spec.k_in = 0.1;
    toy.spec.k_out = 0.1;
    toy.spec.k_n = 0.0;

    const double exact = toy.value_by_enumeration(2, 1, 1);
    const auto batch = toy.as_paths(100);
    const auto lsmc = pricing::lsmc_on_paths(batch, toy.spec, {1.0, 3});
    CHECK(std::abs(lsmc.price - exact) <= 3.0 * std::max(lsmc.rmse, 1e-12));

    // regression stability: degree 2 and degree 3 agree on the toy instance
    const auto lsmc2 = pricing::lsmc_on_paths(batch, toy.spec, {1.0, 2});
    CHECK(std::abs(lsmc2.price - lsmc.price) <= 3.0 * std::max(lsmc.rmse, 1e-12));
}

TEST_CASE("storage: fast-churn value is positive and increases with volatility") {
    StorageSpec spec;  // fast-churn defaults: 100 MWh, 5 MWh/day, one year
    const std::size_t n = 8192;
    std::vector<double> values;
    for (double sigma : {0.1, 0.25, 0.5}) {
        auto m = case2_model();
        m.diffusion.sigma = sigma;
        const auto r = pricing::lsmc_value(m, spec, {5.0, 3}, {n, 55, 0, false});
        values.push_back(r.price);
    }
    CHECK(values[0] > 0.0);
    CHECK(values[1] > values[0]);
    CHECK(values[2] > values[1]);
}

TEST_CASE("storage: polya and jumptime sampling give compatible values") {
    StorageSpec spec;
    auto m = case2_model();
    m.sampler = ou::GouSamplerKind::PolyaMixture;
    const auto a = pricing::price_storage(m, spec, {5.0, 3}, {8192, 60, 0, false});
    m.sampler = ou::GouSamplerKind::JumpTime;
    const auto b = pricing::price_storage(m, spec, {5.0, 3}, {8192, 61, 0, false});
    const double combined = std::hypot(a.rmse, b.rmse);
    CHECK(std::abs(a.price - b.price) <= 3.0 * combined);
    CHECK(a.contract == "storage");
}

TEST_CASE("swing: value dominates intrinsic and the two case-3 routes agree") {
    const SwingSpec swing{20.0, 1.0, 120.0, 1.0};
    auto m = case3_model();
    const auto combined =
        pricing::price_swing(m, swing, {1.0, 3}, {8192, 70, 0, false});
    // intrinsic: exercising all rights immediately on the flat curve
    const double intrinsic = 120.0 * (22.0 - 20.0);
    CHECK(combined.price >= intrinsic - 3.0 * combined.rmse);

    m.case3_route = market::Case3Route::TwoLeg;
    const auto legs = pricing::price_swing(m, swing, {1.0, 3}, {8192, 71, 0, false});
    CHECK(std::abs(combined.price - legs.price) <=
          3.0 * std::hypot(combined.rmse, legs.rmse));
}

TEST_CASE("feasible envelope equals brute-force reachability on a small grid") {
    StorageSpec spec;
    spec.c_min = 0.0;
    spec.c_max = 4.0;
    spec.c_start = 1.0;
    spec.c_end_target = 2.0;
    spec.a_in = 1.0;
    spec.a_w = 1.0;
    const std::size_t decisions = 6;
    const auto envelope = pricing::feasible_envelope(spec, 1.0, decisions);

    // brute force: walk every regime sequence, keep those ending on the target
    const int levels = 4;
    std::vector<std::vector<bool>> visited(decisions + 1,
                                           std::vector<bool>(levels + 1, false));
    std::vector<int> trail;  // volumes held at stages 0..current
    const std::function<void(int, std::size_t)> walk = [&](int c, std::size_t stage) {
        trail.push_back(c);
        if (stage == decisions) {
            if (c == 2) {
                for (std::size_t s = 0; s <= decisions; ++s) visited[s][trail[s]] = true;
            }
        } else {
            if (c + 1 <= levels) walk(c + 1, stage + 1);
            walk(c, stage + 1);
            if (c - 1 >= 0) walk(c - 1, stage + 1);
        }
        trail.pop_back();
    };
    walk(1, 0);

    for (std::size_t s = 0; s <= decisions; ++s) {
        for (int c = 0; c <= levels; ++c) {
            INFO("stage=", s, " level=", c);
            CHECK(envelope[s][c] == visited[s][c]);
        }
    }
}

TEST_CASE("valuation reports decompose their timings") {
    StorageSpec spec;
    const auto r = pricing::lsmc_value(case2_model(), spec, {5.0, 3}, {4096, 5, 0, false});
    CHECK(r.path_seconds + r.opt_seconds >= 0.95 * r.total_seconds);
    CHECK(r.total_seconds >= r.path_seconds);
    CHECK(r.rmse >= 0.0);

    const auto a = pricing::price_asian(case1_model(), {22.0, 1.0, {}}, {20000, 5, 0, false});
    CHECK(a.path_seconds + a.opt_seconds >= 0.95 * a.total_seconds);
}
