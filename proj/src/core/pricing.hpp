#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "market.hpp"

namespace spotsim::pricing {

/// Arithmetic-average Asian call on the spot fixings.
struct AsianSpec {
    double strike = 22.0;
    double maturity = 1.0;
    /// Fixing indices into the simulation grid; empty means every grid point
    /// 1..M with t_m <= maturity (daily fixings on the default grid).
    std::vector<std::size_t> fixings;
};

struct TerminalRule {
    bool hard = true;              // trim the volume grid to levels that can still reach the target
    double penalty_per_mwh = 0.0;  // used when hard == false
};

/// Storage contract. Cash flows per regime follow the convention
///   inject:    -S(t) - k_in * a_in
///   idle:      -k_n
///   withdraw:  +S(t) - k_out * a_w
/// with volume transitions clamped to [c_min, c_max].
struct StorageSpec {
    double c_min = 0.0;
    double c_max = 100.0;
    double c_start = 0.0;
    double c_end_target = 0.0;
    double a_in = 5.0;  // MWh/day
    double a_w = 5.0;   // MWh/day
    double k_in = 0.1;
    double k_out = 0.1;
    double k_n = 0.0;
    TerminalRule terminal;
    double horizon_years = 1.0;

    void validate(double volume_step) const;
};

/// Swing contract: `rights` daily exercise rights of size a_w at the given
/// strike. Maps onto a storage with c_start = rights, target 0 and no injection.
struct SwingSpec {
    double strike = 22.0;
    double a_w = 1.0;
    double rights = 120.0;
    double horizon_years = 1.0;
};

StorageSpec to_storage(const SwingSpec& swing);

struct LsmcConfig {
    double volume_step = 5.0;  // MWh
    int basis_degree = 3;      // monomials in log-spot
};

struct ValuationReport {
    double price = 0.0;
    double rmse = 0.0;  // sample std of path payoffs / sqrt(n)
    double path_seconds = 0.0;
    double opt_seconds = 0.0;
    double total_seconds = 0.0;
    std::string contract;
    std::string sampler;
    std::size_t n_paths = 0;

    std::string summary_line() const;
};

ValuationReport price_asian(const market::MarketModel& model, const AsianSpec& spec,
                            const market::SimOptions& sim, int steps_per_year = 365);

/// Backward LSMC induction on an existing path batch (regression estimates pick
/// the regime, realized path cash flows value it).
ValuationReport lsmc_on_paths(const market::PathBatch& batch, const StorageSpec& spec,
                              const LsmcConfig& config, double rate = 0.0);

/// Simulates and runs the induction; the report splits path time from
/// optimization time.
ValuationReport lsmc_value(const market::MarketModel& model, const StorageSpec& spec,
                           const LsmcConfig& config, const market::SimOptions& sim,
                           int steps_per_year = 365);

ValuationReport price_storage(const market::MarketModel& model, const StorageSpec& spec,
                              const LsmcConfig& config, const market::SimOptions& sim,
                              int steps_per_year = 365);

ValuationReport price_swing(const market::MarketModel& model, const SwingSpec& spec,
                            const LsmcConfig& config, const market::SimOptions& sim,
                            int steps_per_year = 365);

/// Feasible volume levels per stage (stage s = volume held before decision s+1,
/// stage M = terminal), from forward reachability intersected with backward
/// reachability of the terminal set. Exposed for the envelope tests.
std::vector<std::vector<bool>> feasible_envelope(const StorageSpec& spec,
                                                 double volume_step,
                                                 std::size_t n_decisions);

}  // namespace spotsim::pricing
