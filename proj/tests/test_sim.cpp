#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/newsvendor.hpp"
#include "loadshare/sim.hpp"

using namespace loadshare;

namespace {

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.customers = 3;
    cfg.alpha_policy = AlphaPolicy::fixed(0.5);
    cfg.horizon = 4;
    cfg.master_seed = 99;
    cfg.allocation_methods = {AllocationMethod::shapley,
                              AllocationMethod::nucleolus};
    return cfg;
}

std::vector<double> flat_loads(int customers, double value) {
    return std::vector<double>(customers, value);
}

}  // namespace

TEST_CASE("config validation rejects out-of-range scenarios") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.timestep_minutes = 7;  // does not divide the day
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.beta_s = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.alpha_policy = AlphaPolicy::uniform_random(0.8, 0.2);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.expectation_engine = EngineConfig::Kind::monte_carlo;
    cfg.mc_samples = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.allocation_methods = {AllocationMethod::shapley,
                              AllocationMethod::shapley};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.allocation_methods.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    // b_minus == r_w makes the cost ratio 0: no finite quantile
    cfg = base_config();
    cfg.prices = Prices(0.10, 0.06, 0.06, 0.03);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    CHECK_NOTHROW(base_config().validate());
}

TEST_CASE("synthetic profiles are deterministic, nonnegative, diurnal") {
    const LoadMatrix a = synthesize_profiles(4, 96, 42);
    const LoadMatrix b = synthesize_profiles(4, 96, 42);
    REQUIRE(a.size() == 96);
    REQUIRE(a[0].size() == 4);
    CHECK(a == b);

    const LoadMatrix c = synthesize_profiles(4, 96, 43);
    CHECK(a != c);

    double lo = 1e300;
    for (const auto& row : a)
        for (double v : row) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            lo = std::min(lo, v);
        }

    // mean daily shape: evening peak (17:00-21:00) above the overnight
    // trough (01:00-05:00), averaged over customers and days
    const int spd = 48;
    std::vector<double> shape(spd, 0.0);
    for (int t = 0; t < 96; ++t)
        for (double v : a[t]) shape[t % spd] += v;
    double evening = 0.0, night = 0.0;
    int n_e = 0, n_n = 0;
    for (int s = 0; s < spd; ++s) {
        const double hour = (s + 0.5) * 24.0 / spd;
        if (hour >= 17.0 && hour <= 21.0) evening += shape[s], ++n_e;
        if (hour >= 1.0 && hour <= 5.0) night += shape[s], ++n_n;
    }
    CHECK(evening / n_e > night / n_n);
}

TEST_CASE("alpha = 0 means nothing to disclose and a worthless game") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 2;
    cfg.alpha_policy = AlphaPolicy::fixed(0.0);
    const TimestepResult r = run_timestep(cfg, flat_loads(2, 10.0), 0);

    CHECK(r.grand_value == 0.0);
    CHECK(r.forecast_nodata.mean == r.forecast_data.mean);
    CHECK(r.forecast_nodata.variance == r.forecast_data.variance);
    CHECK(r.quantity_nodata == r.quantity_data);
    for (const auto& [method, alloc] : r.allocations) {
        (void)method;
        for (double xi : alloc.x) CHECK(xi == 0.0);
    }
    for (double ls : r.disclosed_loads) CHECK(ls == 0.0);
}

TEST_CASE("single customer game splits its value evenly") {
    // v({0}) = v({1}) = 0, so both Shapley and the nucleolus give each
    // player half the grand value
    ScenarioConfig cfg = base_config();
    cfg.customers = 1;
    const TimestepResult r = run_timestep(cfg, flat_loads(1, 10.0), 0);

    REQUIRE(r.grand_value > 0.0);
    for (const auto& [method, alloc] : r.allocations) {
        (void)method;
        REQUIRE(alloc.x.size() == 2);
        CHECK(alloc.x[0] == doctest::Approx(r.grand_value / 2).epsilon(1e-9));
        CHECK(alloc.x[1] == doctest::Approx(r.grand_value / 2).epsilon(1e-9));
    }
}

TEST_CASE("disclosure removes schedulable variance from the forecast") {
    ScenarioConfig cfg = base_config();
    const TimestepResult r = run_timestep(cfg, flat_loads(3, 8.0), 2);

    CHECK(r.forecast_data.variance < r.forecast_nodata.variance);
    // realized-demand variance is the unschedulable part only
    double sigma_u2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double mu_u = (1 - 0.5) * 8.0;
        sigma_u2 += (cfg.beta_u * mu_u) * (cfg.beta_u * mu_u);
    }
    CHECK(r.forecast_data.variance == doctest::Approx(sigma_u2).epsilon(1e-12));

    // consumption combines the disclosed schedulable load with the
    // unschedulable mean
    for (int i = 0; i < 3; ++i)
        CHECK(r.consumption[i] ==
              doctest::Approx(r.disclosed_loads[i] + 4.0).epsilon(1e-12));
}

TEST_CASE("with no unschedulable noise the grand value is a profit identity") {
    // beta_u = 0 collapses realized demand to a point mass at the disclosed
    // total, so E[H(q*_M, D_M)] = (r_r - r_w) * mean and
    // v(grand) = that - baseline
    ScenarioConfig cfg = base_config();
    cfg.beta_u = 0.0;
    cfg.alpha_policy = AlphaPolicy::fixed(0.6);
    const TimestepResult r = run_timestep(cfg, {8.0, 12.0, 5.0}, 1);

    REQUIRE(r.forecast_data.variance == 0.0);
    REQUIRE(r.forecast_data.mean > 0.0);
    CHECK(r.quantity_data == r.forecast_data.mean);
    const double ideal =
        (cfg.prices.r_r - cfg.prices.r_w) * r.forecast_data.mean;
    CHECK(r.grand_value ==
          doctest::Approx(ideal - r.baseline_profit).epsilon(1e-12));
}

TEST_CASE("per-timestep allocations are efficient") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 4;
    const TimestepResult r = run_timestep(cfg, {3.0, 11.0, 6.5, 9.0}, 5);

    REQUIRE(r.allocations.size() == 2);
    for (const auto& [method, alloc] : r.allocations) {
        (void)method;
        double sum = 0.0;
        for (double xi : alloc.x) sum += xi;
        CHECK(std::abs(sum - r.grand_value) <=
              1e-7 * std::max(1.0, std::abs(r.grand_value)));
    }
}

TEST_CASE("grid validation cross-checks the quantile rule") {
    ScenarioConfig cfg = base_config();
    // keep the forecast sharp: a 1000-sample grid resolves the optimum to one
    // step only when the relative uncertainty is a few percent
    cfg.beta_s = 0.08;
    cfg.beta_u = 0.04;
    cfg.grid_validation = GridValidation{100, 1000};
    const TimestepResult r = run_timestep(cfg, flat_loads(3, 9.0), 0);

    REQUIRE(r.grid_check.has_value());
    CHECK(r.grid_check->step > 0.0);
    CHECK(std::abs(r.grid_check->quantity - r.quantity_nodata) <=
          r.grid_check->step * (1 + 1e-12));
    CHECK(r.grid_check->within_one_step);
}

TEST_CASE("run_timestep rejects malformed load rows") {
    const ScenarioConfig cfg = base_config();
    CHECK_THROWS_AS(run_timestep(cfg, flat_loads(2, 1.0), 0), DataError);
    CHECK_THROWS_AS(run_timestep(cfg, {1.0, -0.5, 2.0}, 0), DataError);
    CHECK_THROWS_AS(
        run_timestep(cfg, {1.0, std::nan(""), 2.0}, 0), DataError);
}

TEST_CASE("run_timestep is deterministic") {
    const ScenarioConfig cfg = base_config();
    const TimestepResult a = run_timestep(cfg, {4.0, 7.0, 2.0}, 3);
    const TimestepResult b = run_timestep(cfg, {4.0, 7.0, 2.0}, 3);
    CHECK(a.grand_value == b.grand_value);
    CHECK(a.disclosed_loads == b.disclosed_loads);
    CHECK(a.alphas == b.alphas);
    for (const auto& [method, alloc] : a.allocations)
        CHECK(alloc.x == b.allocations.at(method).x);

    // a different timestep draws different alpha/disclosure streams
    ScenarioConfig rnd = cfg;
    rnd.alpha_policy = AlphaPolicy::uniform_random(0.1, 0.9);
    const TimestepResult c = run_timestep(rnd, {4.0, 7.0, 2.0}, 3);
    const TimestepResult d = run_timestep(rnd, {4.0, 7.0, 2.0}, 4);
    CHECK(c.alphas != d.alphas);
}

TEST_CASE("horizon of one aggregates to the single timestep") {
    ScenarioConfig cfg = base_config();
    cfg.horizon = 1;
    const LoadMatrix profiles{{6.0, 2.0, 4.0}};
    const HorizonResult h = run_horizon(cfg, profiles);
    const TimestepResult single = run_timestep(cfg, profiles[0], 0);

    REQUIRE(h.timesteps.size() == 1);
    CHECK(h.aggregate.total_grand_value == single.grand_value);
    CHECK(h.aggregate.baseline_total == single.baseline_profit);
    for (const auto& [method, alloc] : single.allocations) {
        const MethodAggregate& agg = h.aggregate.for_method(method);
        for (std::size_t i = 0; i < alloc.x.size(); ++i)
            CHECK(agg.total_payoff[i] == alloc.x[i]);
    }
    for (int i = 0; i < 3; ++i) {
        CHECK(h.aggregate.total_consumption[i] == single.consumption[i]);
        CHECK(h.aggregate.energy_cost[i] ==
              cfg.prices.r_r * single.consumption[i]);
        CHECK(h.aggregate.avg_schedulable_load[i] ==
              single.schedulable_means[i]);
    }
}

TEST_CASE("horizon aggregation conserves value and defines shares") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 4;
    cfg.horizon = 96;
    cfg.alpha_policy = AlphaPolicy::uniform_random(0.1, 0.9);
    const LoadMatrix profiles = synthesize_profiles(4, 96, cfg.master_seed);
    const HorizonResult h = run_horizon(cfg, profiles);

    REQUIRE(h.timesteps.size() == 96);
    CHECK(h.aggregate.warnings.empty());
    CHECK(h.aggregate.nucleolus_skipped_timesteps == 0);
    for (const auto& agg : h.aggregate.per_method) {
        CHECK(std::abs(agg.conservation_gap) <=
              96 * 1e-7 * std::max(1.0, std::abs(h.aggregate.total_grand_value)));
        CHECK(agg.retailer_share_defined);
        CHECK(agg.retailer_share > 0.0);
        CHECK(agg.retailer_share < 1.0);
        REQUIRE(agg.customer_savings.size() == 4);
    }
    // per-timestep efficiency across the whole run
    for (const TimestepResult& r : h.timesteps) {
        for (const auto& [method, alloc] : r.allocations) {
            (void)method;
            double sum = 0.0;
            for (double xi : alloc.x) sum += xi;
            CHECK(std::abs(sum - r.grand_value) <=
                  1e-7 * std::max(1.0, std::abs(r.grand_value)));
        }
    }
}

TEST_CASE("run_horizon rejects profile shape mismatches") {
    ScenarioConfig cfg = base_config();
    cfg.horizon = 2;
    CHECK_THROWS_AS(run_horizon(cfg, LoadMatrix{{1.0, 2.0, 3.0}}), DataError);
    CHECK_THROWS_AS(
        run_horizon(cfg, LoadMatrix{{1.0, 2.0, 3.0}, {1.0, 2.0}}), DataError);
}

TEST_CASE("games beyond twelve players skip the nucleolus with a warning") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 12;
    cfg.horizon = 1;
    const LoadMatrix profiles{flat_loads(12, 5.0)};
    const HorizonResult h = run_horizon(cfg, profiles);

    CHECK(h.timesteps[0].nucleolus_skipped);
    CHECK(h.timesteps[0].allocations.count(AllocationMethod::nucleolus) == 0);
    CHECK(h.timesteps[0].allocations.count(AllocationMethod::shapley) == 1);
    CHECK(h.aggregate.nucleolus_skipped_timesteps == 1);
    REQUIRE(!h.aggregate.warnings.empty());
    const MethodAggregate& nuc =
        h.aggregate.for_method(AllocationMethod::nucleolus);
    CHECK(!nuc.retailer_share_defined);
}

TEST_CASE("method comparison produces six deterministic arms") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 2;
    cfg.horizon = 8;
    const LoadMatrix profiles = synthesize_profiles(2, 8, 7);
    const MethodComparison mc = method_comparison(cfg, profiles, 40);

    REQUIRE(mc.arms.size() == 6);
    CHECK(mc.samples_per_timestep == 40);
    const char* names[] = {"nodata_nodata_mean", "nodata_nodata_cr",
                           "data_nodata_mean",   "data_nodata_cr",
                           "data_data_mean",     "data_data_cr"};
    for (int i = 0; i < 6; ++i) {
        CHECK(mc.arms[i].index == i + 1);
        CHECK(mc.arms[i].name == names[i]);
        CHECK(mc.arms[i].samples.size() == 8u * 40u);
        CHECK(std::isfinite(mc.arms[i].mean));
        CHECK(mc.arms[i].stddev >= 0.0);
        CHECK(mc.arms[i].stddev_within >= 0.0);
        CHECK(std::isfinite(mc.arms[i].stddev_within));
    }

    const MethodComparison again = method_comparison(cfg, profiles, 40);
    for (int i = 0; i < 6; ++i)
        CHECK(mc.arms[i].samples == again.arms[i].samples);

    CHECK_THROWS_AS(method_comparison(cfg, profiles, 1), ConfigError);
}

TEST_CASE("symmetric imbalance prices collapse mean and quantile arms") {
    // (b_minus - r_w) == (r_w - b_plus) puts the critical fractile at 1/2,
    // so the quantile rule orders exactly the forecast mean
    ScenarioConfig cfg = base_config();
    cfg.prices = Prices(0.10, 0.06, 0.09, 0.03);
    cfg.customers = 2;
    cfg.horizon = 6;
    const LoadMatrix profiles = synthesize_profiles(2, 6, 11);
    const MethodComparison mc = method_comparison(cfg, profiles, 30);

    CHECK(mc.arms[0].samples == mc.arms[1].samples);
    CHECK(mc.arms[2].samples == mc.arms[3].samples);
    CHECK(mc.arms[4].samples == mc.arms[5].samples);
}

TEST_CASE("quantile purchasing and data access pay off directionally") {
    ScenarioConfig cfg = base_config();
    cfg.customers = 4;
    cfg.horizon = 48;
    cfg.alpha_policy = AlphaPolicy::uniform_random(0.1, 0.9);
    const LoadMatrix profiles = synthesize_profiles(4, 48, cfg.master_seed);
    const MethodComparison mc = method_comparison(cfg, profiles, 60);

    // cost-ratio arm beats the forecast-mean arm inside each world
    CHECK(mc.arms[1].mean > mc.arms[0].mean);
    CHECK(mc.arms[3].mean > mc.arms[2].mean);
    CHECK(mc.arms[5].mean > mc.arms[4].mean);
    // disclosure narrows the conditional profit distribution, stepwise from
    // undisclosed realizations to a fully informed purchase
    CHECK(mc.arms[2].stddev_within < mc.arms[0].stddev_within);
    CHECK(mc.arms[3].stddev_within < mc.arms[1].stddev_within);
    CHECK(mc.arms[4].stddev_within < mc.arms[2].stddev_within);
    CHECK(mc.arms[5].stddev_within < mc.arms[3].stddev_within);
}
