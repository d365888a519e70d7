#include "loadshare/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "loadshare/errors.hpp"
#include "loadshare/load_model.hpp"
#include "loadshare/rng.hpp"

namespace loadshare {

AlphaPolicy AlphaPolicy::fixed(double value) {
    AlphaPolicy p;
    p.kind = Kind::fixed;
    p.value = value;
    return p;
}

AlphaPolicy AlphaPolicy::uniform_random(double low, double high) {
    AlphaPolicy p;
    p.kind = Kind::uniform_random;
    p.low = low;
    p.high = high;
    return p;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

constexpr std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

}  // namespace

void ScenarioConfig::validate() const {
    require(customers >= 1 && customers <= Coalition::kMaxPlayers - 1,
            "customers: must lie in [1, " +
                std::to_string(Coalition::kMaxPlayers - 1) + "]");
    require(horizon >= 1, "horizon: must be at least 1");
    require(timestep_minutes >= 1 && timestep_minutes <= 1440 &&
                1440 % timestep_minutes == 0,
            "timestep_minutes: must divide a 1440-minute day");
    require(std::isfinite(beta_s) && beta_s >= 0.0,
            "beta_s: must be finite and nonnegative");
    require(std::isfinite(beta_u) && beta_u >= 0.0,
            "beta_u: must be finite and nonnegative");
    switch (alpha_policy.kind) {
        case AlphaPolicy::Kind::fixed:
            require(std::isfinite(alpha_policy.value) &&
                        alpha_policy.value >= 0.0 && alpha_policy.value <= 1.0,
                    "alpha_policy.fixed.value: must lie in [0,1]");
            break;
        case AlphaPolicy::Kind::uniform_random:
            require(std::isfinite(alpha_policy.low) &&
                        std::isfinite(alpha_policy.high) &&
                        0.0 <= alpha_policy.low &&
                        alpha_policy.low <= alpha_policy.high &&
                        alpha_policy.high <= 1.0,
                    "alpha_policy.uniform_random: need 0 <= low <= high <= 1");
            break;
    }
    if (expectation_engine == EngineConfig::Kind::monte_carlo)
        require(mc_samples >= 2,
                "expectation_engine.monte_carlo.n_samples: must be at least 2");
    require(!allocation_methods.empty(),
            "allocation_methods: must not be empty");
    for (std::size_t i = 0; i < allocation_methods.size(); ++i)
        for (std::size_t j = i + 1; j < allocation_methods.size(); ++j)
            require(allocation_methods[i] != allocation_methods[j],
                    "allocation_methods: duplicate entry");
    if (grid_validation) {
        require(grid_validation->n_grid >= 2,
                "grid_validation.n_grid: must be at least 2");
        require(grid_validation->n_samples >= 2,
                "grid_validation.n_samples: must be at least 2");
    }
    // A degenerate fractile has no finite quantile once any forecast carries
    // variance, so reject it up front rather than mid-run.
    const double gamma = cost_ratio(prices);
    require(gamma > 0.0 && gamma < 1.0,
            "prices: cost ratio " + std::to_string(gamma) + " is degenerate");
}

EngineConfig ScenarioConfig::engine_for(int timestep) const {
    if (expectation_engine == EngineConfig::Kind::analytical)
        return EngineConfig::analytical();
    return EngineConfig::monte_carlo(mc_samples, master_seed, timestep);
}

LoadMatrix synthesize_profiles(int customers, int horizon,
                               std::uint64_t master_seed, int steps_per_day) {
    if (customers < 1) throw ConfigError("customers: must be at least 1");
    if (horizon < 1) throw ConfigError("horizon: must be at least 1");
    if (steps_per_day < 1) throw ConfigError("steps_per_day: must be at least 1");

    const auto bump = [](double hour, double center, double width) {
        const double z = (hour - center) / width;
        return std::exp(-0.5 * z * z);
    };

    LoadMatrix loads(horizon, std::vector<double>(customers, 0.0));
    for (int i = 1; i <= customers; ++i) {
        Rng rng = Rng::derive(master_seed, {stream_tag::profile, u64(i)});
        const double scale = rng.next_uniform(0.3, 1.2);
        // per-customer peak jitter so households do not stack identically
        const double morning = rng.next_uniform(6.5, 8.5);
        const double evening = rng.next_uniform(17.5, 19.5);
        const GaussianDist noise_dist(0.0, 0.06 * scale * 0.06 * scale);
        for (int t = 0; t < horizon; ++t) {
            const double hour = 24.0 * (t % steps_per_day) / steps_per_day;
            const double shape = 0.30 + 0.25 * bump(hour, morning, 1.3) +
                                 0.55 * bump(hour, evening, 2.0);
            const double noise = sample(noise_dist, rng);
            loads[t][i - 1] = std::max(0.0, scale * shape + noise);
        }
    }
    return loads;
}

namespace {

// The world shared by run_timestep and method_comparison: alpha draws and
// disclosure draws come from per-(timestep, customer) streams, so both
// entry points see the same realized schedulable loads.
TimestepLoadSet build_load_set(const ScenarioConfig& cfg,
                               const std::vector<double>& loads_at_t, int t,
                               std::vector<double>* alphas_out) {
    const int m = cfg.customers;
    if (static_cast<int>(loads_at_t.size()) != m)
        throw DataError("timestep " + std::to_string(t) + ": expected " +
                        std::to_string(m) + " customer loads, got " +
                        std::to_string(loads_at_t.size()));
    std::vector<CustomerLoadComponent> components;
    std::vector<DisclosedLoad> disclosures;
    components.reserve(m);
    disclosures.reserve(m);
    if (alphas_out) alphas_out->assign(m, 0.0);
    for (int i = 1; i <= m; ++i) {
        const double mu_total = loads_at_t[i - 1];
        if (!std::isfinite(mu_total) || mu_total < 0.0)
            throw DataError("timestep " + std::to_string(t) + ", customer " +
                            std::to_string(i) +
                            ": load must be finite and nonnegative");
        double alpha = cfg.alpha_policy.value;
        if (cfg.alpha_policy.kind == AlphaPolicy::Kind::uniform_random) {
            Rng rng = Rng::derive(cfg.master_seed,
                                  {stream_tag::alpha, u64(t), u64(i)});
            alpha = rng.next_uniform(cfg.alpha_policy.low,
                                     cfg.alpha_policy.high);
        }
        if (alphas_out) (*alphas_out)[i - 1] = alpha;
        CustomerLoadComponent comp =
            split_load(i, mu_total, alpha, cfg.beta_s, cfg.beta_u);
        Rng disc = Rng::derive(cfg.master_seed,
                               {stream_tag::disclosure, u64(t), u64(i)});
        const double l_s =
            sample(GaussianDist(comp.mu_s, comp.sigma_s * comp.sigma_s), disc);
        components.push_back(comp);
        disclosures.push_back({i, l_s});
    }
    return TimestepLoadSet(t, std::move(components), std::move(disclosures));
}

}  // namespace

TimestepResult run_timestep(const ScenarioConfig& cfg,
                            const std::vector<double>& loads_at_t, int t) {
    TimestepResult r;
    r.timestep = t;
    const TimestepLoadSet loads = build_load_set(cfg, loads_at_t, t, &r.alphas);
    const int m = cfg.customers;

    r.disclosed_loads.resize(m);
    r.schedulable_means.resize(m);
    r.consumption.resize(m);
    for (int i = 1; i <= m; ++i) {
        const CustomerLoadComponent& comp = loads.component(i);
        r.disclosed_loads[i - 1] = loads.disclosed(i);
        r.schedulable_means[i - 1] = comp.mu_s;
        r.consumption[i - 1] = loads.disclosed(i) + comp.mu_u;
    }

    r.forecast_nodata = conditional_forecast(loads, Coalition::empty());
    r.forecast_data = realized_demand_dist(loads);
    r.quantity_nodata = optimal_quantity(r.forecast_nodata, cfg.prices).quantity;
    r.quantity_data = optimal_quantity(r.forecast_data, cfg.prices).quantity;
    r.baseline_profit =
        expected_profit_analytical(r.quantity_nodata, r.forecast_data, cfg.prices);

    const ValueTable table = build_value_table(loads, cfg.prices, cfg.engine_for(t));
    r.grand_value = table.grand_value();
    r.monotonicity_violations = table.monotonicity_violations();

    for (AllocationMethod method : cfg.allocation_methods) {
        if (method == AllocationMethod::nucleolus && m + 1 > 12) {
            r.nucleolus_skipped = true;
            continue;
        }
        Allocation a = method == AllocationMethod::shapley ? shapley(table)
                                                           : nucleolus(table);
        r.ir_violations[method] = check_individual_rationality(a, table);
        r.allocations.emplace(method, std::move(a));
    }

    if (cfg.grid_validation && r.forecast_nodata.mean > 0.0) {
        const GridValidation& gv = *cfg.grid_validation;
        const double upper = 2.0 * r.forecast_nodata.mean;
        const QuantityDecision grid = grid_search_quantity(
            r.forecast_nodata, cfg.prices, gv.n_grid, gv.n_samples, upper,
            derive_seed(cfg.master_seed, {stream_tag::grid_check, u64(t)}));
        GridCheck check;
        check.quantity = grid.quantity;
        check.step = upper / (gv.n_grid - 1);
        check.within_one_step =
            std::abs(grid.quantity - r.quantity_nodata) <=
            check.step * (1.0 + 1e-12);
        r.grid_check = check;
    }
    return r;
}

const MethodAggregate& AggregateReport::for_method(AllocationMethod m) const {
    for (const MethodAggregate& ma : per_method)
        if (ma.method == m) return ma;
    throw std::logic_error("AggregateReport: method not aggregated");
}

HorizonResult run_horizon(const ScenarioConfig& cfg,
                          const LoadMatrix& profiles) {
    cfg.validate();
    if (static_cast<int>(profiles.size()) != cfg.horizon)
        throw DataError("profiles: expected " + std::to_string(cfg.horizon) +
                        " timesteps, got " + std::to_string(profiles.size()));

    HorizonResult out;
    out.timesteps.reserve(profiles.size());
    for (int t = 0; t < cfg.horizon; ++t)
        out.timesteps.push_back(run_timestep(cfg, profiles[t], t));

    const int m = cfg.customers;
    AggregateReport& agg = out.aggregate;
    agg.total_consumption.assign(m, 0.0);
    agg.energy_cost.assign(m, 0.0);
    agg.avg_schedulable_load.assign(m, 0.0);

    for (const TimestepResult& r : out.timesteps) {
        agg.total_grand_value += r.grand_value;
        agg.baseline_total += r.baseline_profit;
        agg.monotonicity_violations += r.monotonicity_violations;
        if (r.nucleolus_skipped) ++agg.nucleolus_skipped_timesteps;
        if (r.quantity_nodata < 0.0 || r.quantity_data < 0.0)
            ++agg.negative_quantities;
        for (int i = 0; i < m; ++i) {
            if (r.disclosed_loads[i] < 0.0) ++agg.negative_disclosures;
            agg.total_consumption[i] += r.consumption[i];
            agg.avg_schedulable_load[i] += r.schedulable_means[i];
        }
    }
    for (int i = 0; i < m; ++i) {
        agg.energy_cost[i] = cfg.prices.r_r * agg.total_consumption[i];
        agg.avg_schedulable_load[i] /= cfg.horizon;
    }

    for (AllocationMethod method : cfg.allocation_methods) {
        MethodAggregate ma;
        ma.method = method;
        ma.total_payoff.assign(m + 1, 0.0);
        // grand value restricted to timesteps where this method actually ran,
        // so a skipped nucleolus does not poison its share denominator
        double covered_grand = 0.0;
        for (const TimestepResult& r : out.timesteps) {
            const auto it = r.allocations.find(method);
            if (it == r.allocations.end()) continue;
            covered_grand += r.grand_value;
            for (int i = 0; i <= m; ++i) ma.total_payoff[i] += it->second.x[i];
        }
        double payoff_sum = 0.0;
        for (double v : ma.total_payoff) payoff_sum += v;
        ma.conservation_gap = payoff_sum - covered_grand;
        if (covered_grand > 0.0) {
            ma.retailer_share = ma.total_payoff[0] / covered_grand;
            ma.retailer_share_defined = true;
        }
        if (agg.baseline_total > 0.0) {
            ma.retailer_uplift = ma.total_payoff[0] / agg.baseline_total;
            ma.retailer_uplift_defined = true;
        }
        ma.customer_savings.assign(m, 0.0);
        for (int i = 1; i <= m; ++i) {
            if (agg.energy_cost[i - 1] > 0.0)
                ma.customer_savings[i - 1] =
                    ma.total_payoff[i] / agg.energy_cost[i - 1];
            else
                agg.warnings.push_back(
                    "customer " + std::to_string(i) +
                    ": nonpositive total energy cost; savings reported as 0");
        }
        agg.per_method.push_back(std::move(ma));
    }

    if (agg.nucleolus_skipped_timesteps > 0)
        agg.warnings.push_back(
            "nucleolus skipped on " +
            std::to_string(agg.nucleolus_skipped_timesteps) + " timesteps: " +
            std::to_string(m + 1) + " players exceeds the 12-player LP limit");
    return out;
}

MethodComparison method_comparison(const ScenarioConfig& cfg,
                                   const LoadMatrix& profiles,
                                   std::int64_t samples_per_timestep) {
    cfg.validate();
    if (samples_per_timestep < 2)
        throw ConfigError("samples_per_timestep: must be at least 2");
    if (static_cast<int>(profiles.size()) != cfg.horizon)
        throw DataError("profiles: expected " + std::to_string(cfg.horizon) +
                        " timesteps, got " + std::to_string(profiles.size()));

    static const char* const kArmNames[6] = {
        "nodata_nodata_mean", "nodata_nodata_cr", "data_nodata_mean",
        "data_nodata_cr",     "data_data_mean",   "data_data_cr"};

    MethodComparison out;
    out.samples_per_timestep = samples_per_timestep;
    out.arms.resize(6);
    const std::size_t total = static_cast<std::size_t>(cfg.horizon) *
                              static_cast<std::size_t>(samples_per_timestep);
    for (int a = 0; a < 6; ++a) {
        out.arms[a].index = a + 1;
        out.arms[a].name = kArmNames[a];
        out.arms[a].samples.reserve(total);
    }

    for (int t = 0; t < cfg.horizon; ++t) {
        const TimestepLoadSet loads = build_load_set(cfg, profiles[t], t, nullptr);
        const GaussianDist d_nodata = conditional_forecast(loads, Coalition::empty());
        const GaussianDist d_data = realized_demand_dist(loads);
        const double q_mean_nodata = d_nodata.mean;
        const double q_cr_nodata = optimal_quantity(d_nodata, cfg.prices).quantity;
        const double q_mean_data = d_data.mean;
        const double q_cr_data = optimal_quantity(d_data, cfg.prices).quantity;

        Rng world_nodata =
            Rng::derive(cfg.master_seed, {stream_tag::comparison, u64(t), 0});
        Rng world_data =
            Rng::derive(cfg.master_seed, {stream_tag::comparison, u64(t), 1});
        for (std::int64_t j = 0; j < samples_per_timestep; ++j) {
            const double demand0 = sample(d_nodata, world_nodata);
            const double demand1 = sample(d_data, world_data);
            out.arms[0].samples.push_back(profit(q_mean_nodata, demand0, cfg.prices));
            out.arms[1].samples.push_back(profit(q_cr_nodata, demand0, cfg.prices));
            out.arms[2].samples.push_back(profit(q_mean_nodata, demand1, cfg.prices));
            out.arms[3].samples.push_back(profit(q_cr_nodata, demand1, cfg.prices));
            out.arms[4].samples.push_back(profit(q_mean_data, demand1, cfg.prices));
            out.arms[5].samples.push_back(profit(q_cr_data, demand1, cfg.prices));
        }
    }

    for (ArmSummary& arm : out.arms) {
        const std::size_t n = arm.samples.size();
        double mean = 0.0;
        for (double v : arm.samples) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : arm.samples) ss += (v - mean) * (v - mean);
        const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
        arm.mean = mean;
        arm.stddev = std::sqrt(var);
        // within-timestep variance, averaged over the horizon
        const std::size_t chunk = static_cast<std::size_t>(samples_per_timestep);
        double within = 0.0;
        for (std::size_t start = 0; start < n; start += chunk) {
            double m = 0.0;
            for (std::size_t k = start; k < start + chunk; ++k)
                m += arm.samples[k];
            m /= static_cast<double>(chunk);
            double s = 0.0;
            for (std::size_t k = start; k < start + chunk; ++k)
                s += (arm.samples[k] - m) * (arm.samples[k] - m);
            within += s / static_cast<double>(chunk - 1);
        }
        arm.stddev_within =
            std::sqrt(within / static_cast<double>(cfg.horizon));
        arm.std_error = std::sqrt(var / static_cast<double>(n));
        std::vector<double> sorted = arm.samples;
        std::sort(sorted.begin(), sorted.end());
        std::size_t k = static_cast<std::size_t>(0.05 * static_cast<double>(n));
        if (k >= n) k = n - 1;
        arm.q05 = sorted[k];
    }
    return out;
}

}  // namespace loadshare
