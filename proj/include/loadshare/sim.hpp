// sim.hpp: scenario engine: synthetic load profiles, the per-timestep
// data-sharing game over a horizon, monthly aggregation, and the six-arm
// forecast/purchase method comparison.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadshare/allocation.hpp"
#include "loadshare/game.hpp"
#include "loadshare/gaussian.hpp"
#include "loadshare/newsvendor.hpp"

namespace loadshare {

// How each customer's schedulable share alpha is chosen per timestep.
struct AlphaPolicy {
    enum class Kind { fixed, uniform_random };
    Kind kind = Kind::fixed;
    double value = 0.5;  // fixed
    double low = 0.0;    // uniform_random
    double high = 1.0;

    static AlphaPolicy fixed(double value);
    static AlphaPolicy uniform_random(double low, double high);
};

// Optional per-timestep cross-check of the quantile rule against a Monte
// Carlo grid search over [0, 2 * mean(D_empty)].
struct GridValidation {
    int n_grid = 100;
    std::int64_t n_samples = 1000;
};

struct ScenarioConfig {
    Prices prices{0.10, 0.06, 0.16, 0.03};
    int customers = 1;
    double beta_s = 1.0;
    double beta_u = 0.5;
    AlphaPolicy alpha_policy = AlphaPolicy::fixed(0.5);
    int timestep_minutes = 30;
    int horizon = 48;
    std::uint64_t master_seed = 0;
    EngineConfig::Kind expectation_engine = EngineConfig::Kind::analytical;
    std::int64_t mc_samples = 1000;
    std::vector<AllocationMethod> allocation_methods{AllocationMethod::shapley};
    std::optional<GridValidation> grid_validation;

    // Throws ConfigError; also rejects a degenerate cost ratio, which would
    // make the quantile rule undefined for any uncertain forecast.
    void validate() const;

    EngineConfig engine_for(int timestep) const;
    int steps_per_day() const { return 1440 / timestep_minutes; }
};

// Measured mean loads, [timestep][customer_id - 1], kWh per timestep.
using LoadMatrix = std::vector<std::vector<double>>;

// Nonnegative diurnal profiles: base + morning/evening Gaussian bumps +
// clamped noise, one derived stream per customer. Deterministic per seed.
LoadMatrix synthesize_profiles(int customers, int horizon,
                               std::uint64_t master_seed,
                               int steps_per_day = 48);

struct GridCheck {
    double quantity = 0.0;
    double step = 0.0;
    bool within_one_step = false;  // against the no-data quantile rule
};

struct TimestepResult {
    int timestep = 0;
    GaussianDist forecast_nodata;
    GaussianDist forecast_data;
    double quantity_nodata = 0.0;
    double quantity_data = 0.0;
    double grand_value = 0.0;
    // E[H(q*_empty, D_M)]: what the retailer earns without any disclosure.
    double baseline_profit = 0.0;
    std::vector<double> alphas;             // per customer
    std::vector<double> disclosed_loads;    // realized l_s per customer
    std::vector<double> schedulable_means;  // mu_s per customer
    std::vector<double> consumption;        // l_s + mu_u per customer
    std::map<AllocationMethod, Allocation> allocations;
    std::map<AllocationMethod, std::vector<int>> ir_violations;
    int monotonicity_violations = 0;
    bool nucleolus_skipped = false;
    std::optional<GridCheck> grid_check;
};

struct MethodAggregate {
    AllocationMethod method = AllocationMethod::shapley;
    std::vector<double> total_payoff;  // per player 0..M
    // x0_total / sum of grand values; defined only when the denominator > 0.
    double retailer_share = 0.0;
    bool retailer_share_defined = false;
    // payoff_i / (r_r * consumption_i); 0 when the energy cost is nonpositive.
    std::vector<double> customer_savings;
    double retailer_uplift = 0.0;  // x0_total / baseline_total
    bool retailer_uplift_defined = false;
    double conservation_gap = 0.0;  // sum of payoffs - sum of grand values
};

struct AggregateReport {
    std::vector<MethodAggregate> per_method;  // order as requested
    double total_grand_value = 0.0;
    double baseline_total = 0.0;
    std::vector<double> total_consumption;     // per customer
    std::vector<double> energy_cost;           // r_r * total_consumption
    std::vector<double> avg_schedulable_load;  // mean mu_s per customer
    int monotonicity_violations = 0;
    int negative_disclosures = 0;
    int negative_quantities = 0;
    int nucleolus_skipped_timesteps = 0;
    std::vector<std::string> warnings;

    const MethodAggregate& for_method(AllocationMethod m) const;
};

// One independent game: split loads (alpha and disclosure streams are
// derived from (seed, tag, timestep, customer)), forecast, purchase, value
// table, allocations, diagnostics.
TimestepResult run_timestep(const ScenarioConfig& config,
                            const std::vector<double>& loads_at_t, int t);

struct HorizonResult {
    std::vector<TimestepResult> timesteps;
    AggregateReport aggregate;
};

HorizonResult run_horizon(const ScenarioConfig& config,
                          const LoadMatrix& profiles);

// One arm of the profit-distribution experiment. Arms cross the realization
// world (demand drawn from D_empty vs D_M), the forecast the retailer uses,
// and the purchase rule (forecast mean vs cost-ratio quantile):
//   1 nodata_nodata_mean  2 nodata_nodata_cr
//   3 data_nodata_mean    4 data_nodata_cr
//   5 data_data_mean      6 data_data_cr
// The two arms of a mean/cr pair share demand samples, as do all arms within
// one realization world, so pairwise contrasts are low-variance.
struct ArmSummary {
    int index = 0;
    std::string name;
    std::vector<double> samples;  // pooled over the horizon, timestep-major
    double mean = 0.0;
    double stddev = 0.0;  // of the pooled samples; includes diurnal swings
    // Dispersion around each timestep's own mean: the width of the
    // conditional profit distribution, which is what disclosure narrows.
    double stddev_within = 0.0;
    double std_error = 0.0;
    double q05 = 0.0;  // empirical 5% quantile
};

struct MethodComparison {
    std::vector<ArmSummary> arms;  // the six arms, in index order
    std::int64_t samples_per_timestep = 0;
};

MethodComparison method_comparison(const ScenarioConfig& config,
                                   const LoadMatrix& profiles,
                                   std::int64_t samples_per_timestep = 100);

}  // namespace loadshare
