#include "validate.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

#include "stats.hpp"
#include "variates.hpp"

namespace spotsim::app {

namespace {

constexpr double kChfUGrid[8] = {0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0};

struct JumpLeg {
    ou::GouParams gou;       // used for cases 1 and 2
    ou::SymBgouParams sym;   // used for case 3
    bool symmetric = false;
};

JumpLeg model_leg(const market::MarketModel& model) {
    JumpLeg leg;
    if (const auto* c1 = std::get_if<market::Case1Jumps>(&model.jumps)) {
        leg.gou = {c1->k, c1->p * c1->lambda, c1->beta1, 0.0};
    } else if (const auto* c2 = std::get_if<market::Case2Jumps>(&model.jumps)) {
        leg.gou = {c2->k1, c2->lambda1, c2->beta1, 0.0};
    } else if (const auto* c3 = std::get_if<market::Case3Jumps>(&model.jumps)) {
        const double lam = c3->seasonal ? 2.0 * c3->seasonal->theta : c3->constant_intensity;
        leg.sym = {c3->k, lam, c3->beta, 0.0};
        leg.symmetric = true;
    }
    return leg;
}

using Sampler = std::function<double(RngStream&)>;

Sampler make_sampler(const JumpLeg& leg, ou::GouSamplerKind kind, double dt) {
    if (leg.symmetric) {
        return [leg, kind, dt](RngStream& rng) {
            return ou::sym_bgou_step(kind, leg.sym, 0.0, dt, rng);
        };
    }
    return [leg, kind, dt](RngStream& rng) {
        return ou::gou_step(kind, leg.gou, 0.0, dt, rng);
    };
}

std::complex<double> leg_chf(const JumpLeg& leg, double u, double t) {
    return leg.symmetric ? ou::sym_bgou_chf({u, 0.0}, t, leg.sym)
                         : ou::gou_chf({u, 0.0}, t, leg.gou);
}

std::vector<double> draw(const Sampler& sampler, std::size_t n, std::uint64_t seed) {
    std::vector<double> xs(n);
    RngStream rng(seed, 0);
    for (auto& x : xs) x = sampler(rng);
    return xs;
}

/// Largest band-normalized chf deviation over the fixed u grid.
double chf_mismatch(std::span<const double> xs, const JumpLeg& leg, double t) {
    const double band = 4.0 / std::sqrt(static_cast<double>(xs.size()));
    double worst = 0.0;
    for (double u : kChfUGrid) {
        const auto emp = stats::empirical_chf(xs, u);
        const auto exact = leg_chf(leg, u, t);
        worst = std::max(worst, std::abs(emp.real() - exact.real()) / band);
        worst = std::max(worst, std::abs(emp.imag() - exact.imag()) / band);
    }
    return worst;
}

struct ChfMoments {
    double mean;
    double var;
};

/// First two moments from central differences of the exact chf at u = 0.
ChfMoments chf_moments(const JumpLeg& leg, double t) {
    const double h = 1e-3;
    const auto p = leg_chf(leg, h, t);
    const auto m = leg_chf(leg, -h, t);
    const double mean = (p.imag() - m.imag()) / (2.0 * h);
    const double second = -((p.real() - 2.0 + m.real()) / (h * h));
    return {mean, second - mean * mean};
}

struct MomentCheck {
    double mean_dev_se = 0.0;
    double var_dev_se = 0.0;
};

MomentCheck moment_deviation(std::span<const double> xs, const ChfMoments& exact) {
    const auto mv = stats::mean_var(xs);
    MomentCheck out;
    out.mean_dev_se = std::abs(mv.mean - exact.mean) / mv.se_mean;
    // SE of the sample variance from the sample's own fourth moment.
    double m4 = 0.0;
    for (double x : xs) {
        const double d = x - mv.mean;
        m4 += d * d * d * d;
    }
    m4 /= static_cast<double>(xs.size());
    const double se_var =
        std::sqrt(std::max(m4 - mv.var * mv.var, 1e-300) / static_cast<double>(xs.size()));
    out.var_dev_se = std::abs(mv.var - exact.var) / se_var;
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

/// Polya-weighted Erlang series for the gamma remainder chf, summed far enough
/// past the spec grid to push truncation below the tolerance.
bool polya_series_identity(std::string& detail) {
    const int terms = 400;
    double worst = 0.0;
    for (double a : {0.1, 0.5, 0.9}) {
        for (double alpha : {0.4, 1.0, 7.0}) {
            for (double u : {0.5, 2.0}) {
                for (double beta : {1.0, 2.0}) {
                    const std::complex<double> iu{0.0, u};
                    const std::complex<double> closed =
                        std::pow((beta - iu * a) / (beta - iu), alpha);
                    const std::complex<double> z = beta / (beta - iu * a);
                    std::complex<double> zk = 1.0;
                    double w = std::pow(a, alpha);
                    std::complex<double> sum = 0.0;
                    for (int k = 0; k <= terms; ++k) {
                        sum += w * zk;
                        w *= (1.0 - a) * (alpha + k) / (k + 1.0);
                        zk *= z;
                    }
                    worst = std::max(worst, std::abs(sum - closed));
                }
            }
        }
    }
    detail = "max |series - closed| = " + fmt(worst);
    return worst <= 1e-8;
}

}  // namespace

bool ValidationReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

std::string ValidationReport::table() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << (c.informational ? "(info) " : "")
           << c.name;
        if (!c.detail.empty()) os << "  [" << c.detail << "]";
        os << '\n';
    }
    os << (all_passed() ? "validation: all checks passed"
                        : "validation: at least one check FAILED")
       << '\n';
    return os.str();
}

ValidationReport run_validation(const RunConfig& cfg) {
    ValidationReport report;
    const auto add = [&](std::string name, bool passed, std::string detail,
                         bool informational = false) {
        report.checks.push_back({std::move(name), passed, informational, std::move(detail)});
    };

    {
        std::string detail;
        const bool ok = polya_series_identity(detail);
        add("polya-series-identity", ok, detail);
    }

    {
        double worst = 0.0;
        for (double t : {0.1, 0.5, 1.0}) {
            const double c = market::drift_h_closed(cfg.model, t);
            const double g = market::drift_h_generic(cfg.model, t);
            worst = std::max(worst, std::abs(c - g) / std::max(1.0, std::abs(c)));
        }
        add("drift-closed-vs-generic", worst <= 1e-12, "max rel dev = " + fmt(worst));
    }

    const JumpLeg leg = model_leg(cfg.model);
    const double dt = 30.0 / 365.0;  // coarse step gives the chf checks real power
    const std::size_t n_chf = 200000;

    std::vector<std::vector<double>> samples;
    const ou::GouSamplerKind exact_kinds[] = {ou::GouSamplerKind::JumpTime,
                                              ou::GouSamplerKind::PolyaMixture,
                                              ou::GouSamplerKind::RandomRate};
    const auto exact = chf_moments(leg, dt);
    for (const auto kind : exact_kinds) {
        const auto xs = draw(make_sampler(leg, kind, dt), n_chf, cfg.seed + 1000);
        const double worst = chf_mismatch(xs, leg, dt);
        add("chf-match[" + std::string(ou::to_string(kind)) + "]", worst <= 1.0,
            "max |emp-exact| = " + fmt(worst) + " bands");
        const auto mc = moment_deviation(xs, exact);
        add("moments[" + std::string(ou::to_string(kind)) + "]",
            mc.mean_dev_se <= 5.0 && mc.var_dev_se <= 5.0,
            "mean dev " + fmt(mc.mean_dev_se) + " SE, var dev " + fmt(mc.var_dev_se) + " SE");
        samples.push_back(xs);
    }

    {
        const std::size_t n_ks = 100000;
        const char* names[] = {"jumptime", "polya", "randomrate"};
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                std::span<const double> a(samples[i].data(), std::min(n_ks, samples[i].size()));
                std::span<const double> b(samples[j].data(), std::min(n_ks, samples[j].size()));
                const double d = stats::ks_two_sample(a, b);
                const double crit = stats::ks_critical_two_sample(0.01, a.size(), b.size());
                add(std::string("ks[") + names[i] + " vs " + names[j] + "]", d <= crit,
                    "D = " + fmt(d) + ", crit = " + fmt(crit));
            }
        }
    }

    {
        // Martingale: mean of S(T)/F(0,T) must be 1 within 5 SE.
        const bool biased = cfg.model.sampler == ou::GouSamplerKind::EulerBiased;
        const std::size_t n = std::max<std::size_t>(cfg.n_paths, 100000);
        const auto grid = market::TimeGrid::daily(cfg.horizon_years, cfg.steps_per_year);
        std::vector<double> ratio(n);
        const double f_T = cfg.model.forward(grid.horizon());
        market::for_each_path(cfg.model, grid, {n, cfg.seed + 2000, cfg.workers, false},
                              [&](std::size_t p, std::span<const double> spot) {
                                  ratio[p] = spot.back() / f_T;
                              });
        const auto mv = stats::mean_var(ratio);
        const double dev = std::abs(mv.mean - 1.0) / mv.se_mean;
        add(std::string("martingale[") + std::string(ou::to_string(cfg.model.sampler)) + "]",
            biased ? true : dev <= 5.0, "|mean-1| = " + fmt(dev) + " SE", biased);
    }

    {
        // Euler bias demonstration: the one-jump-per-step scheme composed over a
        // year fails the exact moment check (the variance carries the bias).
        const ou::GouParams p = leg.symmetric
                                    ? ou::GouParams{leg.sym.k, 0.5 * leg.sym.lambda,
                                                    leg.sym.beta, 0.0}
                                    : leg.gou;
        const std::size_t n = 600000;
        const int steps = 365;
        std::vector<double> xs(n);
        RngStream rng(cfg.seed + 3000, 0);
        for (auto& x : xs) {
            double y = 0.0;
            for (int s = 0; s < steps; ++s) {
                y = ou::sample_gou_euler(p, y, 1.0 / steps, rng);
            }
            x = y;
        }
        const JumpLeg gou_leg{p, {}, false};
        const auto mc = moment_deviation(xs, chf_moments(gou_leg, 1.0));
        const bool bias_detected = mc.mean_dev_se > 5.0 || mc.var_dev_se > 5.0;
        const bool euler_forced = cfg.model.sampler == ou::GouSamplerKind::EulerBiased;
        add(euler_forced ? "euler-bias: exact-moment check FAIL-as-expected"
                         : "euler-bias-demonstrated",
            bias_detected,
            "mean dev " + fmt(mc.mean_dev_se) + " SE, var dev " + fmt(mc.var_dev_se) +
                " SE (expected to exceed 5)",
            euler_forced);
    }

    return report;
}

}  // namespace spotsim::app
